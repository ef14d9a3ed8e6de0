#pragma once

#include <stdexcept>
#include <string>

namespace bwmr {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A file or stream could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// An argument violated a documented precondition (bad index, bad size, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The same input block index was copied twice.
class DuplicateBlockError : public Error {
public:
    using Error::Error;
};

/// finish() was called before every input block arrived.
class MissingBlocksError : public Error {
public:
    MissingBlocksError(const std::string& what, std::uint64_t missing)
        : Error(what), missing_blocks(missing) {}
    std::uint64_t missing_blocks;
};

/// The same (level, chunk index) was written to a backend twice.
class DuplicateChunkError : public Error {
public:
    using Error::Error;
};

/// finalize() was called with chunks still unwritten.
class MissingChunksError : public Error {
public:
    using Error::Error;
};

/// A file does not start with the expected magic bytes.
class BadMagicError : public Error {
public:
    using Error::Error;
};

/// A file ends before its declared structures do (no valid footer).
class TruncatedFileError : public Error {
public:
    using Error::Error;
};

/// The file's format version is not one this build understands.
class VersionError : public Error {
public:
    using Error::Error;
};

/// A stored payload failed its CRC32C check.
class ChecksumError : public Error {
public:
    using Error::Error;
};

/// A compressed stream is structurally invalid (truncated or garbled).
class CorruptStreamError : public Error {
public:
    using Error::Error;
};

} // namespace bwmr
