#include "nct/module_geometry.hpp"

#include <numeric>

#include "nct/errors.hpp"

namespace nct {

ModuleGeometry::ModuleGeometry(long long a_, long long b_, long long c_, long long d_, Theta th, cplx t)
    : a(a_), b(b_), c(c_), d(d_), theta(std::move(th)), tau(t) {
    if (std::llabs(det()) != 1) throw RejectedInput("geometry: det g must be +-1");
    if (c == 0) throw RejectedInput("geometry: c must be nonzero");
    if (!(tau.imag() > 0)) throw RejectedInput("geometry: Im tau must be positive");
    if (std::gcd(std::llabs(d), std::llabs(c)) != 1) throw RejectedInput("geometry: gcd(d, c) must be 1");
    if (rk() == 0.0) throw RejectedInput("geometry: c theta + d vanishes");
}

long long ModuleGeometry::d_inverse_mod_c() const {
    const long long m = std::llabs(c);
    if (m == 1) return 0;
    // extended Euclid on (d mod m, m)
    long long r0 = ((d % m) + m) % m, r1 = m, s0 = 1, s1 = 0;
    while (r1 != 0) {
        const long long q = r0 / r1;
        std::swap(r0, r1);
        r1 -= q * r0;
        std::swap(s0, s1);
        s1 -= q * s0;
    }
    if (r0 != 1) throw RejectedInput("geometry: d not invertible mod c");
    return ((s0 % m) + m) % m;
}

ModuleGeometry ModuleGeometry::dual() const {
    // g^{-1} = det^{-1} (d,-b;-c,a)
    const long long e = det();
    return ModuleGeometry(d * e, -b * e, -c * e, a * e, theta_prime_exact(), tau);
}

nlohmann::json to_json(const ModuleGeometry& g) {
    return {{"a", g.a}, {"b", g.b}, {"c", g.c}, {"d", g.d}, {"theta", g.theta.str()}, {"tau", {g.tau.real(), g.tau.imag()}}};
}

ModuleGeometry geometry_from_json(const nlohmann::json& j) {
    try {
        const auto& t = j.at("theta");
        Theta th = t.is_string() ? Theta(t.get<std::string>()) : Theta::from_double(t.get<double>());
        const auto& tj = j.at("tau");
        cplx tau = tj.is_array() ? cplx(tj.at(0).get<double>(), tj.at(1).get<double>())
                                 : cplx(tj.at("re").get<double>(), tj.at("im").get<double>());
        return ModuleGeometry(j.at("a").get<long long>(), j.at("b").get<long long>(), j.at("c").get<long long>(),
                              j.at("d").get<long long>(), th, tau);
    } catch (const nlohmann::json::exception& e) {
        throw RejectedInput(std::string("geometry json: ") + e.what());
    }
}

}  // namespace nct
