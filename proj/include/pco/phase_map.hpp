#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace pco {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MapValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Concave increasing bijection of [0,1] used to transform a phase into the
/// potential-like domain where pulse coupling is additive. Immutable after
/// construction; safe to share across threads.
class PhaseMap {
public:
    struct CustomSpec {
        std::function<double(double)> f;
        std::function<double(double)> f_inverse;
        std::function<double(double)> f_prime;
        std::string name = "custom";
    };

    /// Leaky integrate-and-fire map f(x) = I*(1 - exp(-c*x)), c = ln(I/(I-1)).
    /// Requires I > 1.
    static PhaseMap leaky_integrate_and_fire(double current);

    /// Arbitrary map; the monotonicity/concavity/boundary/roundtrip checks run
    /// at construction and throw MapValidationError on failure.
    static PhaseMap custom(CustomSpec spec);

    double f(double phi) const;
    double inverse(double y) const;
    double derivative(double phi) const;

    bool is_lif() const { return lif_; }
    double lif_current() const { return current_; }
    const std::string& name() const { return name_; }

private:
    PhaseMap() = default;
    void validate() const;
    static double clamp_unit(double x, const char* what);

    bool lif_ = false;
    double current_ = 0.0;
    double c_ = 0.0;  // ln(I/(I-1)) for the LIF kind
    std::function<double(double)> f_;
    std::function<double(double)> inv_;
    std::function<double(double)> prime_;
    std::string name_;
};

enum class RegionClass {
    A1,          // f(tau) + eps < 1
    A2Boundary,  // f(tau) + eps == 1 within tolerance
    A2Interior,  // f(tau) + eps > 1
};

const char* to_string(RegionClass r);

/// Partition of the (tau, eps) parameter square by the sign of f(tau)+eps-1.
/// The boundary belongs to A2; A2Interior is the strict-inequality region.
RegionClass classify_region(const PhaseMap& map, double tau, double eps,
                            double boundary_tol = 1e-9);

/// Interspike interval of the completely synchronized period-one solution,
/// 1 - [f^-1(f(tau)+eps) - tau]. Only defined when f(tau)+eps < 1.
double sync_isi(const PhaseMap& map, double tau, double eps);

}  // namespace pco
