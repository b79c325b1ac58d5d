#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hopi {

/// Base class of every error the workbench reports to callers.
class HopiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public HopiError {
public:
    ParseError(int line, int col, std::string expected)
        : HopiError("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                    ": expected " + expected),
          line_(line), col_(col), expected_(std::move(expected)) {}

    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& expected() const { return expected_; }

private:
    int line_;
    int col_;
    std::string expected_;
};

/// The term is outside the declared calculus. `path` locates the offending subterm.
class SortError : public HopiError {
public:
    SortError(std::string path, std::string reason)
        : HopiError("sort error at " + (path.empty() ? std::string("<root>") : path) + ": " +
                    reason),
          path_(std::move(path)), reason_(std::move(reason)) {}

    const std::string& path() const { return path_; }
    const std::string& reason() const { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

class IoError : public HopiError {
public:
    using HopiError::HopiError;
};

class DuplicateDefError : public HopiError {
public:
    explicit DuplicateDefError(const std::string& name)
        : HopiError("duplicate definition '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class OpenTermError : public HopiError {
public:
    OpenTermError(const std::string& name, std::vector<std::string> free)
        : HopiError(describe(name, free)), name_(name), free_(std::move(free)) {}

    const std::string& name() const { return name_; }
    const std::vector<std::string>& free_variables() const { return free_; }

private:
    static std::string describe(const std::string& name, const std::vector<std::string>& free) {
        std::string msg = "definition '" + name + "' has free variables:";
        for (const auto& v : free) msg += " " + v;
        return msg;
    }

    std::string name_;
    std::vector<std::string> free_;
};

class NotAProcess : public HopiError {
public:
    using HopiError::HopiError;
};

class UnsupportedCalculus : public HopiError {
public:
    using HopiError::HopiError;
};

class UnknownClaim : public HopiError {
public:
    explicit UnknownClaim(const std::string& id) : HopiError("unknown claim '" + id + "'") {}
};

}  // namespace hopi
