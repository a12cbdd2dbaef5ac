#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace fock {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Gaussian weight α and complex dimension n shared by every norm, kernel and measure.
class FockParams {
public:
    FockParams(double alpha, int n);

    double alpha() const { return alpha_; }
    int n() const { return n_; }

    bool operator==(const FockParams&) const = default;

private:
    double alpha_;
    int n_;
};

/// A point of C^n.
class CPoint {
public:
    CPoint() = default;
    explicit CPoint(std::vector<cplx> coords);
    CPoint(std::initializer_list<cplx> coords);

    static CPoint zero(int n);

    int dim() const { return static_cast<int>(c_.size()); }
    cplx operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
    std::span<const cplx> coords() const { return c_; }

    /// |z|^2 = <z, z>.
    double norm2() const;
    double norm() const;

    CPoint operator-(const CPoint& other) const;
    CPoint operator+(const CPoint& other) const;
    CPoint operator*(double s) const;

    bool operator==(const CPoint&) const = default;

private:
    std::vector<cplx> c_;
};

/// Hermitian inner product <z, w> = sum_j z_j conj(w_j).
cplx inner(const CPoint& z, const CPoint& w);

/// |z - w|^2 without forming the difference.
double dist2(const CPoint& z, const CPoint& w);

/// exp(log_abs + i phase), kept apart so callers can combine exponents before exponentiating.
struct LogComplex {
    double log_abs = -kInf;
    double phase = 0.0;

    cplx value() const;
};

/// Magnitude threshold alpha |z||w| above which kernels go through the log-magnitude path.
inline constexpr double kLogPathThreshold = 600.0;

/// Reproducing kernel K_w(z) = exp(alpha <z, w>) in log form.
LogComplex log_kernel(const FockParams& params, const CPoint& w, const CPoint& z);

/// K_w(z). Overflows to infinity only when the true value exceeds double range.
cplx kernel(const FockParams& params, const CPoint& w, const CPoint& z);

/// Unit-norm kernel k_w(z) = K_w(z) exp(-alpha |w|^2 / 2).
cplx normalized_kernel(const FockParams& params, const CPoint& w, const CPoint& z);

/// k_w(z) exp(-alpha |z|^2 / 2). Its modulus is exactly exp(-alpha |z - w|^2 / 2).
cplx damped_normalized_kernel(const FockParams& params, const CPoint& w, const CPoint& z);

} // namespace fock
