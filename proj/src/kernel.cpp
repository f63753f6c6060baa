#include "nlcalib/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nlcalib/quadrature.hpp"

namespace nlcalib {
namespace {

constexpr double kPi = 3.14159265358979323846;

double sphere_factor(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

}  // namespace

Kernel::Kernel(Family family, int dimension, double p0, double p1,
               std::vector<std::pair<double, double>> table)
    : family_(family), dim_(dimension), p0_(p0), p1_(p1), table_(std::move(table)) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("kernel dimension must be 1 or 2");
    validate_integrability();
}

Kernel Kernel::fractional_power(int dimension, double alpha, double scale) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("fractional power kernel needs alpha in (0,1)");
    if (!(scale > 0.0)) throw std::invalid_argument("fractional power kernel needs scale > 0");
    return Kernel(Family::FractionalPower, dimension, alpha, scale, {});
}

Kernel Kernel::exponential(int dimension, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential kernel needs rate > 0");
    return Kernel(Family::Exponential, dimension, rate, 0.0, {});
}

Kernel Kernel::compact_support(int dimension, double radius, double height) {
    if (!(radius > 0.0)) throw std::invalid_argument("compact support kernel needs radius > 0");
    if (!(height >= 0.0)) throw std::invalid_argument("compact support kernel needs height >= 0");
    return Kernel(Family::CompactSupport, dimension, radius, height, {});
}

Kernel Kernel::custom_radial(int dimension, std::vector<std::pair<double, double>> table) {
    if (table.empty()) throw std::invalid_argument("custom radial kernel needs a nonempty table");
    double prev = 0.0;
    for (const auto& [r, v] : table) {
        if (!(r > prev)) throw std::invalid_argument(
            "custom radial table needs strictly increasing positive distances");
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("custom radial table needs finite nonnegative values");
        prev = r;
    }
    return Kernel(Family::CustomRadial, dimension, 0.0, 0.0, std::move(table));
}

bool Kernel::strictly_positive() const {
    switch (family_) {
        case Family::FractionalPower: return true;
        case Family::Exponential: return true;
        case Family::CompactSupport: return false;  // zero beyond the support radius
        case Family::CustomRadial: return false;    // zero beyond the last abscissa
    }
    return false;
}

double Kernel::support_radius() const {
    switch (family_) {
        case Family::FractionalPower:
        case Family::Exponential: return std::numeric_limits<double>::infinity();
        case Family::CompactSupport: return p0_;
        case Family::CustomRadial: return table_.back().first;
    }
    return 0.0;
}

double Kernel::radial_at(double r) const {
    switch (family_) {
        case Family::FractionalPower: return p1_ * std::pow(r, -static_cast<double>(dim_) - p0_);
        case Family::Exponential: return std::exp(-p0_ * r);
        case Family::CompactSupport: return r <= p0_ ? p1_ : 0.0;
        case Family::CustomRadial: {
            if (r <= table_.front().first) return table_.front().second;
            if (r >= table_.back().first) return r == table_.back().first
                                              ? table_.back().second : 0.0;
            size_t hi = 1;
            while (table_[hi].first < r) ++hi;
            const auto& [r0, v0] = table_[hi - 1];
            const auto& [r1, v1] = table_[hi];
            return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
        }
    }
    return 0.0;
}

double Kernel::radial(double r) const {
    if (r < 0.0) throw std::domain_error("kernel radial distance must be nonnegative");
    if (r == 0.0 && singular_at_origin())
        throw std::domain_error("singular kernel evaluated at zero displacement");
    return radial_at(r);
}

double Kernel::evaluate(double z) const {
    if (dim_ != 1) throw std::invalid_argument("scalar displacement on a 2-d kernel");
    return radial(std::abs(z));
}

double Kernel::evaluate(double z1, double z2) const {
    if (dim_ != 2) throw std::invalid_argument("planar displacement on a 1-d kernel");
    return radial(std::hypot(z1, z2));
}

double Kernel::evaluate(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != dim_)
        throw std::invalid_argument("displacement dimension mismatch");
    return dim_ == 1 ? radial(std::abs(z[0])) : radial(std::hypot(z[0], z[1]));
}

double Kernel::evaluate_truncated(double z, double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    return std::abs(z) < eps ? 0.0 : evaluate(z);
}

double Kernel::evaluate_truncated(double z1, double z2, double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    return std::hypot(z1, z2) < eps ? 0.0 : evaluate(z1, z2);
}

double Kernel::evaluate_truncated(const std::vector<double>& z, double eps) const {
    if (static_cast<int>(z.size()) != dim_)
        throw std::invalid_argument("displacement dimension mismatch");
    return dim_ == 1 ? evaluate_truncated(z[0], eps) : evaluate_truncated(z[0], z[1], eps);
}

TailIntegral Kernel::tail_integral(double radius) const {
    if (!(radius > 0.0)) throw std::invalid_argument("tail radius must be positive");
    const double cn = sphere_factor(dim_);
    if (family_ == Family::FractionalPower) {
        // closed form: c_n * scale * R^(-alpha) / alpha
        return {cn * p1_ * std::pow(radius, -p0_) / p0_, 0.0};
    }
    if (radius >= support_radius()) return {0.0, 0.0};
    auto shell = [this, cn](double r) { return cn * std::pow(r, dim_ - 1) * radial_at(r); };
    QuadratureResult q;
    if (std::isfinite(support_radius()))
        q = integrate(shell, radius, support_radius(), 1e-10);
    else
        q = integrate_to_infinity(shell, radius, 1e-10);
    if (!q.converged) throw std::runtime_error("kernel tail integral did not converge");
    return {q.value, q.error};
}

void Kernel::validate_integrability() {
    const double cn = sphere_factor(dim_);
    const double tol = 1e-8;
    if (family_ == Family::FractionalPower) {
        // Closed antiderivatives exist; the refinement quadrature is checked
        // against them on bounded subranges so it converges for every alpha.
        const double a = p0_, s = p1_;
        integrability_ = cn * s * (1.0 / (1.0 - a) + 1.0 / a);
        auto inner = [this](double r) { return std::pow(r, dim_) * radial_at(r); };
        auto outer = [this](double r) { return std::pow(r, dim_ - 1) * radial_at(r); };
        QuadratureResult qi = integrate(inner, 1e-3, 1.0, tol);
        QuadratureResult qo = integrate(outer, 1.0, 1e3, tol);
        const double ri = s * (1.0 - std::pow(1e-3, 1.0 - a)) / (1.0 - a);
        const double ro = s * (1.0 - std::pow(1e3, -a)) / a;
        if (!qi.converged || !qo.converged ||
            std::abs(qi.value - ri) > 1e-6 * ri || std::abs(qo.value - ro) > 1e-6 * ro)
            throw std::runtime_error("kernel integrability quadrature disagrees with antiderivative");
        return;
    }
    auto inner = [this](double r) { return std::pow(r, dim_) * radial_at(r); };
    auto outer = [this](double r) { return std::pow(r, dim_ - 1) * radial_at(r); };
    QuadratureResult qi = integrate(inner, 0.0, 1.0, tol);
    QuadratureResult qo;
    const double sup = support_radius();
    if (sup <= 1.0)
        qo = QuadratureResult{};
    else if (std::isfinite(sup))
        qo = integrate(outer, 1.0, sup, tol);
    else
        qo = integrate_to_infinity(outer, 1.0, tol);
    if (!qi.converged || !qo.converged)
        throw std::runtime_error("kernel integrability quadrature did not converge");
    integrability_ = cn * (qi.value + qo.value);
    if (!std::isfinite(integrability_))
        throw std::runtime_error("kernel integrability value is not finite");
}

void Kernel::require(Family f, const char* what) const {
    if (family_ != f) throw std::logic_error(std::string(what) + " queried on the wrong family");
}

double Kernel::alpha() const { require(Family::FractionalPower, "alpha"); return p0_; }
double Kernel::scale() const { require(Family::FractionalPower, "scale"); return p1_; }
double Kernel::rate() const { require(Family::Exponential, "rate"); return p0_; }
double Kernel::radius() const { require(Family::CompactSupport, "radius"); return p0_; }
double Kernel::height() const { require(Family::CompactSupport, "height"); return p1_; }

const std::vector<std::pair<double, double>>& Kernel::table() const {
    if (family_ != Family::CustomRadial) throw std::logic_error("table queried on the wrong family");
    return table_;
}

}  // namespace nlcalib
