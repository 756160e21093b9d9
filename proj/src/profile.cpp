#include "lab/profile.hpp"

#include <cmath>

namespace lab {

ProfilePtr make_profile(std::function<Jet(double)> f) {
    return std::make_shared<FunctionProfile>(std::move(f));
}

ProfilePtr identity_profile() {
    return make_profile([](double x) { return Jet{x, 1.0, 0.0}; });
}

ProfilePtr constant_profile(double c) {
    return make_profile([c](double) { return Jet{c, 0.0, 0.0}; });
}

ProfilePtr sine_profile() {
    return make_profile([](double x) { return Jet{std::sin(x), std::cos(x), -std::sin(x)}; });
}

double bump_kernel(double u, double w) {
    double x = u / w;
    if (std::abs(x) >= 1.0) return 0.0;
    double q = 1.0 - x * x;
    return 35.0 / (32.0 * w) * q * q * q;
}

double bump_kernel_d1(double u, double w) {
    double x = u / w;
    if (std::abs(x) >= 1.0) return 0.0;
    double q = 1.0 - x * x;
    return 35.0 / (32.0 * w) * 3.0 * q * q * (-2.0 * x / w);
}

MollifiedKink::MollifiedKink(ProfilePtr left, ProfilePtr right, double xc, double w)
    : left_(std::move(left)), right_(std::move(right)), xc_(xc), w_(w) {}

Jet MollifiedKink::eval(double x) const {
    if (x <= xc_ - w_) return left_->eval(x);
    if (x >= xc_ + w_) return right_->eval(x);
    Jet out;
    auto acc = [&](const Profile& p, double lo, double hi) {
        const GaussRule& g = gauss_legendre(24);
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double y = c + h * g.x[i];
            double k = bump_kernel(x - y, w_) * g.w[i] * h;
            Jet j = p.eval(y);
            out.v += j.v * k;
            out.d1 += j.d1 * k;
            out.d2 += j.d2 * k;
        }
    };
    acc(*left_, x - w_, xc_);
    acc(*right_, xc_, x + w_);
    double jump = right_->eval(xc_).d1 - left_->eval(xc_).d1;
    out.d2 += jump * bump_kernel(x - xc_, w_);
    return out;
}

Jet loglog_factor(double u, double amp, double scale) {
    double l = -std::log(scale * u);
    if (!(l > 1.0)) throw DomainError("loglog_factor: scale*u must be below 1/e");
    double L = std::log(l);
    Jet j;
    j.v = u * (1.0 - amp / L);
    j.d1 = 1.0 - amp * (1.0 / L + 1.0 / (l * L * L));
    j.d2 = -amp / (u * l * L * L) * (1.0 + (L + 2.0) / (l * L));
    return j;
}

// ---------------------------------------------------------------- RadialProfileA

RadialProfileA::RadialProfileA(RadialA p) : p_(p) {
    xin_ = 0.75 * p_.t0;
    win_ = p_.t0 / 8.0;
    xout_ = 1.5;
    wout_ = 0.25;
    if (p_.r0 * (xout_ + wout_) >= std::exp(-1.0))
        throw DomainError("RadialProfileA: r0 too large for the log-log range");
    off_in_ = 0.0;
    off_in_ = p_.a0 * xin_ - middle(xin_).v;
    off_out_ = middle(xout_).v - 0.5 * p_.a0 * xout_;
    double a0 = p_.a0, oo = off_out_;
    auto lin = make_profile([a0](double r) { return Jet{a0 * r, a0, 0.0}; });
    auto tail = make_profile([a0, oo](double r) { return Jet{0.5 * a0 * r + oo, 0.5 * a0, 0.0}; });
    auto mid = make_profile([this](double r) { return middle(r); });
    kin_ = std::make_unique<MollifiedKink>(lin, mid, xin_, win_);
    kout_ = std::make_unique<MollifiedKink>(mid, tail, xout_, wout_);
}

Jet RadialProfileA::middle(double r) const {
    Jet g = loglog_factor(r, p_.a1, p_.r0);
    return {p_.a0 * g.v + off_in_, p_.a0 * g.d1, p_.a0 * g.d2};
}

Jet RadialProfileA::eval(double r) const {
    if (!(r > 0)) throw DomainError("radial profile: r must be positive");
    if (r < xin_ + win_) return kin_->eval(r);
    if (r < xout_ - wout_) return middle(r);
    return kout_->eval(r);
}

// ---------------------------------------------------------------- RadialProfileB

RadialProfileB::RadialProfileB(double delta, double w) : delta_(delta), w_(w) {
    if (!(delta > 0)) throw DomainError("RadialProfileB: delta must be positive");
}

Jet RadialProfileB::eval(double r) const {
    const double x = r - 1.0, e = 1.0 + delta_;
    if (std::abs(x) >= w_) {
        double ax = std::abs(x), sg = x > 0 ? 1.0 : -1.0;
        return {2.0 - std::pow(ax, e), -e * sg * std::pow(ax, delta_),
                -e * delta_ * std::pow(ax, delta_ - 1.0)};
    }
    // substitution y = +-t^p removes the |y|^delta cusp at the origin
    const int p = 4;
    const GaussRule& g = gauss_legendre(32);
    Jet out;
    auto side = [&](double sg, double len) {
        double tmax = std::pow(len, 1.0 / p);
        double c = 0.5 * tmax;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double t = c + c * g.x[i];
            double y = sg * std::pow(t, p);
            double jac = p * std::pow(t, p - 1) * g.w[i] * c;
            double ay = std::abs(y);
            double f = 2.0 - std::pow(ay, e);
            double fp = -e * sg * std::pow(ay, delta_);
            out.v += f * bump_kernel(x - y, w_) * jac;
            out.d1 += fp * bump_kernel(x - y, w_) * jac;
            out.d2 += fp * bump_kernel_d1(x - y, w_) * jac;
        }
    };
    side(+1.0, x + w_);
    side(-1.0, w_ - x);
    return out;
}

// ---------------------------------------------------------------- AngularProfile

AngularProfile::AngularProfile(AngularB p) : p_(p) {
    if (p_.s0 >= std::exp(-1.0)) throw DomainError("AngularProfile: s0 must be below 1/e");
    sc_ = p_.t0 / 3.0;
    w_ = p_.t0 / 16.0;
    double u = std::sin(sc_);
    b0_ = u * p_.b1 / std::log(-std::log(p_.s0 * u));
    auto mid = make_profile([this](double s) {
        double u = std::sin(s), c = std::cos(s);
        Jet g = loglog_factor(u, p_.b1, p_.s0);
        return Jet{g.v + b0_, g.d1 * c, g.d2 * c * c - g.d1 * u};
    });
    k_ = std::make_unique<MollifiedKink>(sine_profile(), mid, sc_, w_);
}

Jet AngularProfile::half(double s) const {
    if (s < sc_ + w_) return k_->eval(s);
    double u = std::sin(s), c = std::cos(s);
    Jet g = loglog_factor(u, p_.b1, p_.s0);
    return {g.v + b0_, g.d1 * c, g.d2 * c * c - g.d1 * u};
}

Jet AngularProfile::eval(double s) const {
    if (!(s > 0 && s < kPi)) throw DomainError("angular profile: s must lie in (0, pi)");
    if (s <= 0.5 * kPi) return half(s);
    Jet j = half(kPi - s);
    return {j.v, -j.d1, j.d2};
}

}  // namespace lab
