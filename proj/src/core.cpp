#include "fock/core.hpp"

#include <cmath>
#include <string>

#include "fock/errors.hpp"

namespace fock {

FockParams::FockParams(double alpha, int n) : alpha_(alpha), n_(n)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw PreconditionError("alpha must be positive");
    }
    if (n < 1) {
        throw PreconditionError("complex dimension n must be at least 1");
    }
}

CPoint::CPoint(std::vector<cplx> coords) : c_(std::move(coords)) {}

CPoint::CPoint(std::initializer_list<cplx> coords) : c_(coords) {}

CPoint CPoint::zero(int n)
{
    return CPoint(std::vector<cplx>(static_cast<std::size_t>(n), cplx{}));
}

double CPoint::norm2() const
{
    double s = 0.0;
    for (const auto& v : c_) {
        s += std::norm(v);
    }
    return s;
}

double CPoint::norm() const { return std::sqrt(norm2()); }

namespace {

void require_same_dim(const CPoint& a, const CPoint& b)
{
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    }
}

} // namespace

CPoint CPoint::operator-(const CPoint& other) const
{
    require_same_dim(*this, other);
    std::vector<cplx> out(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) {
        out[j] = c_[j] - other.c_[j];
    }
    return CPoint(std::move(out));
}

CPoint CPoint::operator+(const CPoint& other) const
{
    require_same_dim(*this, other);
    std::vector<cplx> out(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) {
        out[j] = c_[j] + other.c_[j];
    }
    return CPoint(std::move(out));
}

CPoint CPoint::operator*(double s) const
{
    std::vector<cplx> out(c_);
    for (auto& v : out) {
        v *= s;
    }
    return CPoint(std::move(out));
}

cplx inner(const CPoint& z, const CPoint& w)
{
    require_same_dim(z, w);
    cplx s{};
    for (int j = 0; j < z.dim(); ++j) {
        s += z[j] * std::conj(w[j]);
    }
    return s;
}

double dist2(const CPoint& z, const CPoint& w)
{
    require_same_dim(z, w);
    double s = 0.0;
    for (int j = 0; j < z.dim(); ++j) {
        s += std::norm(z[j] - w[j]);
    }
    return s;
}

cplx LogComplex::value() const
{
    if (log_abs == -kInf) {
        return {};
    }
    return std::polar(std::exp(log_abs), phase);
}

LogComplex log_kernel(const FockParams& params, const CPoint& w, const CPoint& z)
{
    const cplx ip = inner(z, w);
    return {params.alpha() * ip.real(), params.alpha() * ip.imag()};
}

cplx kernel(const FockParams& params, const CPoint& w, const CPoint& z)
{
    if (params.alpha() * z.norm() * w.norm() > kLogPathThreshold) {
        return log_kernel(params, w, z).value();
    }
    return std::exp(params.alpha() * inner(z, w));
}

cplx normalized_kernel(const FockParams& params, const CPoint& w, const CPoint& z)
{
    LogComplex lk = log_kernel(params, w, z);
    lk.log_abs -= 0.5 * params.alpha() * w.norm2();
    return lk.value();
}

cplx damped_normalized_kernel(const FockParams& params, const CPoint& w, const CPoint& z)
{
    // Real part of the exponent collapses to -alpha|z-w|^2/2; computing it that way avoids
    // cancelling three large terms.
    const double a = params.alpha();
    return std::polar(std::exp(-0.5 * a * dist2(z, w)), a * inner(z, w).imag());
}

} // namespace fock
