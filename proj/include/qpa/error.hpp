#pragma once

#include <stdexcept>
#include <string>

namespace qpa {

/// Base class for every error raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input document, bad amplitude literal, duplicate key.
struct ParseError : Error {
    using Error::Error;
};

/// A symbol or state name that is not declared in the automaton.
struct UnknownSymbol : Error {
    using Error::Error;
};

/// A spec that violates the structural restrictions on its transition table.
struct StructureError : Error {
    using Error::Error;
};

/// Recognition was requested on a spec that fails the well-formedness checks.
struct NotWellFormed : Error {
    using Error::Error;
};

/// A live branch advanced past the right end-marker.
struct TapeOverrun : Error {
    using Error::Error;
};

/// A configuration window grew past its configured cap.
struct WindowTooLarge : Error {
    using Error::Error;
};

/// A probe was called on a matrix that does not meet its precondition.
struct PreconditionFailed : Error {
    using Error::Error;
};

/// Invalid DFA input (partial transition function, no states, ...).
struct DfaError : Error {
    using Error::Error;
};

}  // namespace qpa
