#include "levy/quadrature.hpp"

#include <cmath>
#include <string>

namespace levy {

std::vector<ContourNode> contour_points(const SinhContour& contour, const TrapezoidGrid& grid) {
    std::vector<ContourNode> nodes(grid.node_count());
    for (int k = -grid.N; k <= grid.N; ++k) {
        const double y = k * grid.zeta;
        nodes[k + grid.N] = {contour.point(y), contour.deriv(y)};
    }
    return nodes;
}

TrapezoidGrid select_grid(const DecayModel& decay, double eps, double mesh_safety) {
    if (!(eps > 1e-15 && eps < 1e-2)) throw DomainError("select_grid: eps must be in (1e-15, 1e-2)");
    if (!(decay.strip_half_width > 0)) throw DomainError("select_grid: strip width must be positive");
    const double L = std::log(1.0 / eps);
    // mesh from the discretization bound exp(-2 pi d / zeta) <= eps; the
    // rescaled-narrow-strip correction adds ln(1/b) when b < 1
    double Lmesh = L + 2.0;
    if (decay.b < 1.0) Lmesh += std::log(1.0 / decay.b);
    double zeta = 2.0 * pi * decay.strip_half_width / Lmesh;
    zeta *= mesh_safety;

    // truncation: solve kappa ((b/2) e^Y)^{nu} + poly Y - log_growth ln(Y+2) = L + c
    const double target = L - 1.0;
    double Y = 1.0;
    for (int it = 0; it < 64; ++it) {
        double lhs = decay.poly_decay * Y - decay.log_growth * std::log(Y + 2.0);
        if (decay.kappa_exp > 0)
            lhs += decay.kappa_exp * std::pow(0.5 * decay.b * std::exp(Y), decay.nu_exp);
        if (lhs >= target) break;
        // Newton-ish step on the dominating term
        double deriv = decay.poly_decay;
        if (decay.kappa_exp > 0)
            deriv += decay.kappa_exp * decay.nu_exp *
                     std::pow(0.5 * decay.b * std::exp(Y), decay.nu_exp);
        Y += std::min(1.0, (target - lhs) / std::max(deriv, 1e-8));
    }
    TrapezoidGrid grid;
    grid.zeta = zeta;
    grid.N = std::max(4, static_cast<int>(std::ceil(Y / zeta)));
    return grid;
}

cplx trapezoid_sum(const TrapezoidGrid& grid, const SinhContour& contour,
                   const std::function<cplx(cplx)>& integrand) {
    auto term = [&](int k) {
        const double y = k * grid.zeta;
        const cplx v = integrand(contour.point(y)) * contour.deriv(y);
        if (!finite(v))
            throw NumericError("trapezoid_sum: non-finite sample at node k=" + std::to_string(k));
        return v;
    };
    cplx acc = term(0);
    for (int k = 1; k <= grid.N; ++k) acc += term(k) + term(-k);
    return grid.zeta * acc;
}

cplx sum_by_parts(double zeta, double a, const std::vector<cplx>& samples, int iterations) {
    if (iterations < 0) throw DomainError("sum_by_parts: iterations must be >= 0");
    const int n = static_cast<int>(samples.size());
    if (n == 0) return 0.0;
    const int N = (n - 1) / 2;
    const cplx rot = std::exp(-iu * a * zeta);
    if (iterations > 0) {
        const double gap = std::abs(1.0 - rot);
        if (gap < 1e-3)
            throw NumericError("sum_by_parts: a*zeta too close to a multiple of 2*pi (resonance)");
    }
    // forward differences; each pass divides the closed form by e^{ia zeta} - 1
    std::vector<cplx> f = samples;
    for (int m = 0; m < iterations; ++m) {
        for (int j = 0; j + 1 < static_cast<int>(f.size()); ++j) f[j] = f[j + 1] - f[j];
        f.pop_back();
    }
    cplx acc = 0;
    for (int j = 0; j < static_cast<int>(f.size()); ++j) acc += std::pow(rot, j - N) * f[j];
    const cplx den = std::pow(std::exp(iu * a * zeta) - 1.0, iterations);
    return zeta * acc / den;
}

bool bromwich_pair_feasible(double omega_prime, double omega_dprime, double nu, double mu,
                            double c_inf, double k_d) {
    if (!(omega_dprime > 0 && omega_dprime < 0.25 * pi))
        throw DomainError("bromwich_pair_feasible: omega'' must lie in (0, pi/4)");
    if (std::abs(omega_prime) > 0.5 * pi)
        throw DomainError("bromwich_pair_feasible: |omega'| must not exceed pi/2");
    if (nu > 1.0 || mu <= 0.0) {
        return omega_dprime + nu * std::abs(omega_prime) < 0.5 * pi;
    }
    if (nu == 1.0) {
        const double phi0 = -std::atan(mu / c_inf);
        const double dp = k_d * std::abs(omega_prime);
        const double ddp = k_d * omega_dprime;
        return std::abs(omega_prime) + dp + omega_dprime + ddp < 0.5 * pi - std::abs(phi0);
    }
    // nu in (0,1) with mu > 0: fails for any positive pair
    return false;
}

cplx adaptive_flat_integral(const std::function<cplx(double)>& f, double half_width, double tol,
                            int max_doublings) {
    // trapezoid on [-half_width, half_width], halving the mesh until stable
    int n = 64;
    auto eval = [&](int m) {
        const double h = 2.0 * half_width / m;
        cplx acc = 0.5 * (f(-half_width) + f(half_width));
        for (int k = 1; k < m; ++k) acc += f(-half_width + k * h);
        return acc * h;
    };
    cplx prev = eval(n);
    for (int d = 0; d < max_doublings; ++d) {
        n *= 2;
        const cplx cur = eval(n);
        if (std::abs(cur - prev) < tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw NumericError("adaptive_flat_integral: no convergence after doubling limit");
}

}  // namespace levy
