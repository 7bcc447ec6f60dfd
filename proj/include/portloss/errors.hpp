#ifndef PORTLOSS_ERRORS_HPP
#define PORTLOSS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace portloss {

/// Parameter set violates a model invariant (bad input, not a numerical failure).
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// The model is degenerate for the requested evaluation (Sigma = 0, zeta = 0,
/// or Lambda = 0 where a continuous loss law is required).
class degenerate_error : public std::domain_error {
public:
    explicit degenerate_error(const std::string& what) : std::domain_error(what) {}
};

/// A quadrature rule hit its refinement limit without meeting the tolerance.
class quadrature_error : public std::runtime_error {
public:
    explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

/// Root bracketing failed: no sign change over [lo, hi].
class bracket_error : public std::runtime_error {
public:
    explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace portloss

#endif
