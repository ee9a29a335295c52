#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kirchhoff {

// A function in H_0^1 represented by coefficients against the L2-orthonormal
// Dirichlet-Laplacian eigenbasis of a prepared Domain.
struct SpectralField {
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(std::size_t n) : coeffs(n, 0.0) {}

    std::size_t size() const { return coeffs.size(); }
    double& operator[](std::size_t k) { return coeffs[k]; }
    double operator[](std::size_t k) const { return coeffs[k]; }
};

SpectralField operator+(const SpectralField& u, const SpectralField& v);
SpectralField operator-(const SpectralField& u, const SpectralField& v);
SpectralField operator*(double s, const SpectralField& u);

enum class DomainKind { Interval, Rectangle };

struct DomainSpec {
    DomainKind kind = DomainKind::Interval;
    double length_x = 0.0;           // L for intervals, Lx for rectangles
    double length_y = 0.0;           // Ly, rectangles only
    std::size_t n_modes = 0;         // modes per axis
    std::size_t n_quad = 0;          // quadrature points per axis, >= 2*n_modes + 2

    static DomainSpec interval(double length, std::size_t n_modes, std::size_t n_quad);
    static DomainSpec rectangle(double lx, double ly, std::size_t n_modes, std::size_t n_quad);
};

// Prepared box domain with homogeneous Dirichlet conditions: analytic
// eigenpairs of -Laplace, a sine-exact quadrature grid, and cached nodal
// basis values. Immutable after construction and safe to share across threads.
class Domain {
  public:
    explicit Domain(const DomainSpec& spec);

    const DomainSpec& spec() const { return spec_; }
    std::size_t n_modes() const { return eigenvalues_.size(); }
    std::size_t n_nodes() const { return weights_.size(); }
    double measure() const { return measure_; }

    // Ascending; eigenvalue(0) is the first Dirichlet eigenvalue.
    double eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    std::vector<double> synthesize(const SpectralField& u) const;
    SpectralField analyze(const std::vector<double>& nodal) const;

    double l2_sq(const SpectralField& u) const;        // Parseval
    double grad_sq(const SpectralField& u) const;      // sum lambda_k c_k^2
    double norm_l2(const SpectralField& u) const;
    double norm_h1(const SpectralField& u) const;
    // \int |u|^p via quadrature; exact for even integer p within the band limit.
    double lp_pow(const SpectralField& u, double p) const;
    double norm_lp(const SpectralField& u, double p) const;

    // Coefficients of |u|^{q-1} u against the eigenbasis (pseudo-spectral).
    SpectralField power_nonlinearity(const SpectralField& u, double q) const;

    SpectralField unit_mode(std::size_t k) const;

    // Relative defect of power_nonlinearity against a grid-doubled evaluation;
    // tracks the aliasing level of the current n_quad.
    double aliasing_residual(const SpectralField& u, double q) const;

  private:
    Domain(const DomainSpec& spec, bool refined);
    void build_interval();
    void build_rectangle();

    DomainSpec spec_;
    double measure_ = 0.0;
    std::vector<double> eigenvalues_;
    std::vector<double> weights_;        // quadrature weights, flattened grid
    std::vector<double> basis_;          // basis_[i*n_modes + k] = phi_k(x_i)
};

}  // namespace kirchhoff
