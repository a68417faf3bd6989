#pragma once

#include <complex>

#include <json.hpp>

#include "nct/nc_algebra.hpp"

namespace nct {

// Heisenberg module datum g = (a,b;c,d), theta, tau.
struct ModuleGeometry {
    long long a = 0, b = -1, c = 1, d = 0;
    Theta theta;
    cplx tau{0.0, 1.0};

    ModuleGeometry() = default;
    ModuleGeometry(long long a, long long b, long long c, long long d, Theta theta, cplx tau);

    double rk() const { return double(c) * theta.value() + double(d); }
    long long deg() const { return c; }
    double mu() const { return double(c) / rk(); }
    double theta_prime() const { return (double(a) * theta.value() + double(b)) / rk(); }
    double c_tau() const { return 4.0 * kPi * mu() * tau.imag(); }
    long long det() const { return a * d - b * c; }
    // d^{-1} mod |c|
    long long d_inverse_mod_c() const;
    // Dual datum (g^{-1}, g theta).
    ModuleGeometry dual() const;
    Theta theta_prime_exact() const { return Theta::from_double(theta_prime()); }
};

nlohmann::json to_json(const ModuleGeometry& g);
ModuleGeometry geometry_from_json(const nlohmann::json& j);

}  // namespace nct
