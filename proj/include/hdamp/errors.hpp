#pragma once

#include <stdexcept>
#include <string>

namespace hdamp {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A value left the range of double even after rescaling.
class overflow_error : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// An iterative procedure did not reach its tolerance.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The argument principle cannot be applied: |f| is too small somewhere on the contour.
class zero_on_contour_error : public std::runtime_error {
public:
    zero_on_contour_error(const std::string& what, double arc_begin, double arc_end)
        : std::runtime_error(what), arc_begin_(arc_begin), arc_end_(arc_end) {}

    // Offending arc as a fraction of the contour parameter in [0, 1).
    double arc_begin() const noexcept { return arc_begin_; }
    double arc_end() const noexcept { return arc_end_; }

private:
    double arc_begin_;
    double arc_end_;
};

// Bad configuration key or value; the message names the key.
class config_error : public std::invalid_argument {
public:
    config_error(const std::string& key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace hdamp
