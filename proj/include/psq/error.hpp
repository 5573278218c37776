#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psq {

enum class ErrorCode {
	NonInvertible,
	NonCoprimeModuli,
	InvalidArgument,
	LimitTooLarge,
	EmptyReference,
	TableTooSmall,
	WTooLarge,
	NotSquarefree,
	ModulusMismatch,
	ZTooLarge,
	NotCoprime,
	TooLarge,
	QTooLarge,
	Overflow,
};

constexpr std::string_view to_string(ErrorCode c) noexcept
{
	switch (c) {
	case ErrorCode::NonInvertible: return "NonInvertible";
	case ErrorCode::NonCoprimeModuli: return "NonCoprimeModuli";
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::LimitTooLarge: return "LimitTooLarge";
	case ErrorCode::EmptyReference: return "EmptyReference";
	case ErrorCode::TableTooSmall: return "TableTooSmall";
	case ErrorCode::WTooLarge: return "WTooLarge";
	case ErrorCode::NotSquarefree: return "NotSquarefree";
	case ErrorCode::ModulusMismatch: return "ModulusMismatch";
	case ErrorCode::ZTooLarge: return "ZTooLarge";
	case ErrorCode::NotCoprime: return "NotCoprime";
	case ErrorCode::TooLarge: return "TooLarge";
	case ErrorCode::QTooLarge: return "QTooLarge";
	case ErrorCode::Overflow: return "Overflow";
	}
	return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string& what)
	    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
	{
	}

	ErrorCode code() const noexcept { return code_; }

private:
	ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
	throw Error(code, what);
}

} // namespace psq
