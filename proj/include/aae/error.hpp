#pragma once

#include <stdexcept>
#include <string>

namespace aae
{
	// Error taxonomy. The CLI maps each family onto a distinct exit status.
	struct Error : std::runtime_error
	{
		using std::runtime_error::runtime_error;
	};

	struct ConfigError : Error
	{
		using Error::Error;
	};

	struct ValidationError : Error
	{
		using Error::Error;
	};

	struct ShapeError : ValidationError
	{
		using ValidationError::ValidationError;
	};

	// Concatenated feature vector does not fit the configured max_len.
	struct CapacityError : ValidationError
	{
		CapacityError(std::size_t required, std::size_t max_len)
			: ValidationError("feature vector needs length " + std::to_string(required)
							  + " but max_len is " + std::to_string(max_len)),
			  required_length(required)
		{
		}
		std::size_t required_length;
	};

	// line == 0 when the source is not line-oriented.
	struct ParseError : Error
	{
		ParseError(const std::string& what, std::size_t line_no)
			: Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no)
		{
		}
		std::size_t line;
	};

	struct IoError : Error
	{
		using Error::Error;
	};
} // namespace aae
