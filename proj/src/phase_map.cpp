#include "pco/phase_map.hpp"

#include <cmath>

namespace pco {

namespace {
constexpr double kDomainSlack = 1e-12;
constexpr double kBoundaryTol = 1e-12;
constexpr double kRoundtripTol = 1e-10;
}  // namespace

double PhaseMap::clamp_unit(double x, const char* what) {
    if (std::isnan(x) || x < -kDomainSlack || x > 1.0 + kDomainSlack) {
        throw DomainError(std::string(what) + " outside [0,1]: " + std::to_string(x));
    }
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

PhaseMap PhaseMap::leaky_integrate_and_fire(double current) {
    if (!(current > 1.0)) {
        throw ParameterError("LIF current must satisfy I > 1, got " + std::to_string(current));
    }
    PhaseMap m;
    m.lif_ = true;
    m.current_ = current;
    m.c_ = std::log(current / (current - 1.0));
    const double I = current;
    const double c = m.c_;
    m.f_ = [I, c](double x) { return I * (1.0 - std::exp(-c * x)); };
    m.inv_ = [I, c](double y) { return -std::log1p(-y / I) / c; };
    m.prime_ = [I, c](double x) { return I * c * std::exp(-c * x); };
    m.name_ = "lif(I=" + std::to_string(current) + ")";
    return m;
}

PhaseMap PhaseMap::custom(CustomSpec spec) {
    if (!spec.f || !spec.f_inverse || !spec.f_prime) {
        throw MapValidationError("custom phase map requires f, f_inverse and f_prime");
    }
    PhaseMap m;
    m.f_ = std::move(spec.f);
    m.inv_ = std::move(spec.f_inverse);
    m.prime_ = std::move(spec.f_prime);
    m.name_ = std::move(spec.name);
    m.validate();
    return m;
}

void PhaseMap::validate() const {
    if (std::abs(f_(0.0)) > kBoundaryTol) {
        throw MapValidationError("phase map must satisfy f(0) = 0");
    }
    if (std::abs(f_(1.0) - 1.0) > kBoundaryTol) {
        throw MapValidationError("phase map must satisfy f(1) = 1");
    }
    const int grid = 512;
    double prev = f_(0.0);
    for (int k = 1; k <= grid; ++k) {
        const double x = static_cast<double>(k) / grid;
        const double y = f_(x);
        if (!(y > prev)) {
            throw MapValidationError("phase map must be strictly increasing");
        }
        prev = y;
    }
    for (int k = 0; k + 2 <= grid; k += 2) {
        const double a = static_cast<double>(k) / grid;
        const double b = static_cast<double>(k + 2) / grid;
        const double mid = f_((a + b) / 2.0);
        if (!(mid > 0.5 * (f_(a) + f_(b)))) {
            throw MapValidationError("phase map must be strictly concave");
        }
    }
    for (int k = 0; k <= grid; ++k) {
        const double x = static_cast<double>(k) / grid;
        if (std::abs(inv_(f_(x)) - x) > kRoundtripTol) {
            throw MapValidationError("f_inverse is not the inverse of f (roundtrip > 1e-10)");
        }
        if (!(prime_(x) > 0.0)) {
            throw MapValidationError("f_prime must be positive on [0,1]");
        }
    }
}

double PhaseMap::f(double phi) const {
    return f_(clamp_unit(phi, "phase"));
}

double PhaseMap::inverse(double y) const {
    return inv_(clamp_unit(y, "value"));
}

double PhaseMap::derivative(double phi) const {
    return prime_(clamp_unit(phi, "phase"));
}

const char* to_string(RegionClass r) {
    switch (r) {
        case RegionClass::A1: return "A1";
        case RegionClass::A2Boundary: return "A2_boundary";
        case RegionClass::A2Interior: return "A2_interior";
    }
    return "?";
}

RegionClass classify_region(const PhaseMap& map, double tau, double eps,
                            double boundary_tol) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ParameterError("tau must lie in (0,1), got " + std::to_string(tau));
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ParameterError("eps must lie in (0,1), got " + std::to_string(eps));
    }
    const double s = map.f(tau) + eps;
    if (s < 1.0 - boundary_tol) return RegionClass::A1;
    if (s > 1.0 + boundary_tol) return RegionClass::A2Interior;
    return RegionClass::A2Boundary;
}

double sync_isi(const PhaseMap& map, double tau, double eps) {
    const double s = map.f(tau) + eps;
    if (s >= 1.0) {
        throw DomainError("sync_isi requires f(tau)+eps < 1 (A1 parameters)");
    }
    return 1.0 - (map.inverse(s) - tau);
}

}  // namespace pco
