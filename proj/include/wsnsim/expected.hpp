#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace wsnsim {

// Small value-or-error carrier for data-path failures (a corrupted frame is
// an ordinary outcome, not an exception). Precondition violations elsewhere
// in the library still throw.
template <typename T, typename E>
class Expected {
public:
    Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::logic_error("Expected: value() called on error state");
        return std::get<0>(v_);
    }
    T&& value() && {
        if (!ok()) throw std::logic_error("Expected: value() called on error state");
        return std::get<0>(std::move(v_));
    }

    const E& error() const {
        if (ok()) throw std::logic_error("Expected: error() called on value state");
        return std::get<1>(v_);
    }

private:
    std::variant<T, E> v_;
};

} // namespace wsnsim
