#pragma once

#include <stdexcept>
#include <string>

namespace opmean {

// Root of every error the library throws.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class dimension_error : public error {
public:
    using error::error;
};

// Invalid parameters: out-of-range q, weights not on the simplex, excluded cases.
class domain_error : public error {
public:
    using error::error;
};

// A scalar inversion or bracket search left the admissible interval.
class range_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    using error::error;
};

class not_positive_definite : public error {
public:
    not_positive_definite(const std::string& what, double min_eig)
        : error(what), min_eig_(min_eig) {}
    double min_eigenvalue() const noexcept { return min_eig_; }

private:
    double min_eig_;
};

class convergence_error : public error {
public:
    using error::error;
};

}  // namespace opmean
