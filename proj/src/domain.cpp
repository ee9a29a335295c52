#include "kirchhoff/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace kirchhoff {

SpectralField operator+(const SpectralField& u, const SpectralField& v) {
    if (u.size() != v.size()) throw std::invalid_argument("field size mismatch");
    SpectralField w(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) w[k] = u[k] + v[k];
    return w;
}

SpectralField operator-(const SpectralField& u, const SpectralField& v) {
    if (u.size() != v.size()) throw std::invalid_argument("field size mismatch");
    SpectralField w(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) w[k] = u[k] - v[k];
    return w;
}

SpectralField operator*(double s, const SpectralField& u) {
    SpectralField w(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) w[k] = s * u[k];
    return w;
}

DomainSpec DomainSpec::interval(double length, std::size_t n_modes, std::size_t n_quad) {
    DomainSpec s;
    s.kind = DomainKind::Interval;
    s.length_x = length;
    s.n_modes = n_modes;
    s.n_quad = n_quad;
    return s;
}

DomainSpec DomainSpec::rectangle(double lx, double ly, std::size_t n_modes, std::size_t n_quad) {
    DomainSpec s;
    s.kind = DomainKind::Rectangle;
    s.length_x = lx;
    s.length_y = ly;
    s.n_modes = n_modes;
    s.n_quad = n_quad;
    return s;
}

namespace {

void validate(const DomainSpec& spec) {
    if (spec.length_x <= 0.0) throw std::invalid_argument("domain: length must be positive");
    if (spec.kind == DomainKind::Rectangle && spec.length_y <= 0.0)
        throw std::invalid_argument("domain: Ly must be positive");
    if (spec.n_modes == 0) throw std::invalid_argument("domain: n_modes must be positive");
    if (spec.n_quad < 2 * spec.n_modes + 2)
        throw std::invalid_argument("domain: n_quad must be at least 2*n_modes + 2");
}

}  // namespace

Domain::Domain(const DomainSpec& spec) : spec_(spec) {
    validate(spec_);
    if (spec_.kind == DomainKind::Interval)
        build_interval();
    else
        build_rectangle();
}

Domain::Domain(const DomainSpec& spec, bool) : Domain(spec) {}

void Domain::build_interval() {
    const double L = spec_.length_x;
    const std::size_t M = spec_.n_modes;
    const std::size_t N = spec_.n_quad;
    measure_ = L;

    eigenvalues_.resize(M);
    for (std::size_t k = 0; k < M; ++k) {
        const double kp = (double(k + 1) * M_PI) / L;
        eigenvalues_[k] = kp * kp;
    }

    // Equispaced interior nodes: the discrete sine orthogonality makes
    // products phi_j * phi_k integrate exactly for j, k <= n_modes.
    weights_.assign(N, L / double(N + 1));
    basis_.resize(N * M);
    const double amp = std::sqrt(2.0 / L);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = double(i + 1) * L / double(N + 1);
        for (std::size_t k = 0; k < M; ++k)
            basis_[i * M + k] = amp * std::sin(double(k + 1) * M_PI * x / L);
    }
}

void Domain::build_rectangle() {
    const double Lx = spec_.length_x;
    const double Ly = spec_.length_y;
    const std::size_t M = spec_.n_modes;
    const std::size_t N = spec_.n_quad;
    measure_ = Lx * Ly;

    // Tensor modes sorted by eigenvalue, ties broken by (jx, jy).
    std::vector<std::tuple<double, std::size_t, std::size_t>> modes;
    modes.reserve(M * M);
    for (std::size_t jx = 1; jx <= M; ++jx)
        for (std::size_t jy = 1; jy <= M; ++jy) {
            const double lx = double(jx) * M_PI / Lx;
            const double ly = double(jy) * M_PI / Ly;
            modes.emplace_back(lx * lx + ly * ly, jx, jy);
        }
    std::sort(modes.begin(), modes.end());

    const std::size_t n_modes_total = modes.size();
    eigenvalues_.resize(n_modes_total);
    for (std::size_t m = 0; m < n_modes_total; ++m) eigenvalues_[m] = std::get<0>(modes[m]);

    weights_.assign(N * N, (Lx / double(N + 1)) * (Ly / double(N + 1)));
    basis_.resize(N * N * n_modes_total);
    const double amp = std::sqrt(2.0 / Lx) * std::sqrt(2.0 / Ly);
    for (std::size_t ix = 0; ix < N; ++ix) {
        const double x = double(ix + 1) * Lx / double(N + 1);
        for (std::size_t iy = 0; iy < N; ++iy) {
            const double y = double(iy + 1) * Ly / double(N + 1);
            const std::size_t node = ix * N + iy;
            for (std::size_t m = 0; m < n_modes_total; ++m) {
                const auto [lam, jx, jy] = modes[m];
                (void)lam;
                basis_[node * n_modes_total + m] =
                    amp * std::sin(double(jx) * M_PI * x / Lx) * std::sin(double(jy) * M_PI * y / Ly);
            }
        }
    }
}

std::vector<double> Domain::synthesize(const SpectralField& u) const {
    const std::size_t M = n_modes();
    if (u.size() != M) throw std::invalid_argument("synthesize: coefficient count mismatch");
    std::vector<double> nodal(n_nodes(), 0.0);
    for (std::size_t i = 0; i < nodal.size(); ++i) {
        double s = 0.0;
        const double* row = &basis_[i * M];
        for (std::size_t k = 0; k < M; ++k) s += row[k] * u[k];
        nodal[i] = s;
    }
    return nodal;
}

SpectralField Domain::analyze(const std::vector<double>& nodal) const {
    const std::size_t M = n_modes();
    if (nodal.size() != n_nodes()) throw std::invalid_argument("analyze: nodal size mismatch");
    SpectralField u(M);
    for (std::size_t i = 0; i < nodal.size(); ++i) {
        const double wv = weights_[i] * nodal[i];
        const double* row = &basis_[i * M];
        for (std::size_t k = 0; k < M; ++k) u[k] += wv * row[k];
    }
    return u;
}

double Domain::l2_sq(const SpectralField& u) const {
    if (u.size() != n_modes()) throw std::invalid_argument("l2_sq: coefficient count mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * u[k];
    return s;
}

double Domain::grad_sq(const SpectralField& u) const {
    if (u.size() != n_modes()) throw std::invalid_argument("grad_sq: coefficient count mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += eigenvalues_[k] * u[k] * u[k];
    return s;
}

double Domain::norm_l2(const SpectralField& u) const { return std::sqrt(l2_sq(u)); }
double Domain::norm_h1(const SpectralField& u) const { return std::sqrt(grad_sq(u)); }

double Domain::lp_pow(const SpectralField& u, double p) const {
    if (p < 1.0) throw std::invalid_argument("lp_pow: p must be >= 1");
    const std::vector<double> nodal = synthesize(u);
    double s = 0.0;
    for (std::size_t i = 0; i < nodal.size(); ++i) s += weights_[i] * std::pow(std::fabs(nodal[i]), p);
    return s;
}

double Domain::norm_lp(const SpectralField& u, double p) const {
    return std::pow(lp_pow(u, p), 1.0 / p);
}

SpectralField Domain::power_nonlinearity(const SpectralField& u, double q) const {
    std::vector<double> nodal = synthesize(u);
    for (double& v : nodal) v = std::pow(std::fabs(v), q - 1.0) * v;
    return analyze(nodal);
}

SpectralField Domain::unit_mode(std::size_t k) const {
    if (k >= n_modes()) throw std::invalid_argument("unit_mode: index out of range");
    SpectralField u(n_modes());
    u[k] = 1.0;
    return u;
}

double Domain::aliasing_residual(const SpectralField& u, double q) const {
    DomainSpec fine = spec_;
    fine.n_quad = 2 * spec_.n_quad;
    const Domain refined(fine, true);
    const SpectralField coarse = power_nonlinearity(u, q);
    const SpectralField exact = refined.power_nonlinearity(u, q);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const double d = coarse[k] - exact[k];
        num += d * d;
        den += exact[k] * exact[k];
    }
    return std::sqrt(num / (1.0 + den));
}

}  // namespace kirchhoff
