#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ldlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    std::size_t position;
    SyntaxError(const std::string& msg, std::size_t pos)
        : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

struct ResourceError : Error {
    using Error::Error;
};

struct InvalidPosition : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct NotDominated : Error {
    using Error::Error;
};

struct Exhausted {
    std::string what;
    std::uint64_t spent = 0;
};

// Either a decided value or an exhaustion report.
template <class T>
class Outcome {
public:
    Outcome(T v) : value_(std::move(v)) {}
    Outcome(Exhausted e) : exhausted_(std::move(e)) {}

    bool decided() const { return value_.has_value(); }
    explicit operator bool() const { return decided(); }

    const T& value() const {
        if (!value_) throw Error("outcome exhausted: " + exhausted_.what);
        return *value_;
    }
    T& value() {
        if (!value_) throw Error("outcome exhausted: " + exhausted_.what);
        return *value_;
    }
    const T& operator*() const { return value(); }
    const T* operator->() const { return &value(); }
    const Exhausted& exhausted() const { return exhausted_; }

private:
    std::optional<T> value_;
    Exhausted exhausted_;
};

} // namespace ldlab
