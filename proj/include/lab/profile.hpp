#pragma once

#include <functional>
#include <memory>
#include <string>

#include "lab/numeric.hpp"

namespace lab {

/// Scalar function of one variable with two derivatives.
class Profile {
public:
    virtual ~Profile() = default;
    virtual Jet eval(double x) const = 0;
    double value(double x) const { return eval(x).v; }
};

using ProfilePtr = std::shared_ptr<const Profile>;

/// Profile from a callable returning a Jet.
class FunctionProfile : public Profile {
public:
    explicit FunctionProfile(std::function<Jet(double)> f) : f_(std::move(f)) {}
    Jet eval(double x) const override { return f_(x); }

private:
    std::function<Jet(double)> f_;
};

ProfilePtr make_profile(std::function<Jet(double)> f);
ProfilePtr identity_profile();                 // x
ProfilePtr constant_profile(double c);         // c
ProfilePtr sine_profile();                     // sin x

/// C^2 bump K(u) = 35/(32w) (1-(u/w)^2)^3 on [-w, w], unit mass.
double bump_kernel(double u, double w);
double bump_kernel_d1(double u, double w);

/// Convolution of min(left, right) with the bump of half-width w, where
/// `left` is the active branch for x < xc and `right` for x > xc.
/// Outside [xc - w, xc + w] the branches are returned exactly.
class MollifiedKink : public Profile {
public:
    MollifiedKink(ProfilePtr left, ProfilePtr right, double xc, double w);
    Jet eval(double x) const override;
    double center() const { return xc_; }
    double width() const { return w_; }

private:
    ProfilePtr left_, right_;
    double xc_, w_;
};

/// u (1 - amp / log(-log(scale*u))) and derivatives in u; requires scale*u < 1/e.
Jet loglog_factor(double u, double amp, double scale);

/// Radial profile of the first example: linear near the tip, log-log corrected on the
/// middle range, half slope beyond r = 2, joined by mollified concave kinks.
struct RadialA {
    double a0 = 0.5, a1 = 0.01, r0 = 0.1, t0 = 0.05;
};

class RadialProfileA : public Profile {
public:
    explicit RadialProfileA(RadialA p);
    RadialProfileA(const RadialProfileA&) = delete;
    RadialProfileA& operator=(const RadialProfileA&) = delete;
    Jet eval(double r) const override;
    const RadialA& params() const { return p_; }
    double inner_offset() const { return off_in_; }
    double outer_offset() const { return off_out_; }
    double inner_kink() const { return xin_; }
    double outer_kink() const { return xout_; }

private:
    Jet middle(double r) const;
    RadialA p_;
    double xin_, xout_, win_, wout_, off_in_, off_out_;
    std::unique_ptr<MollifiedKink> kin_, kout_;
};

/// Radial profile of the second example: 2 - |r-1|^{1+delta}, mollified at r = 1.
class RadialProfileB : public Profile {
public:
    RadialProfileB(double delta, double w);
    Jet eval(double r) const override;
    double delta() const { return delta_; }
    double width() const { return w_; }

private:
    double delta_, w_;
};

/// Angular profile sin(s)(1 - b1/log(-log(s0 sin s))) + b0 away from the poles, sin(s)
/// near them, symmetric under s -> pi - s.
struct AngularB {
    double b1 = 0.3, s0 = 0.1, t0 = 0.05;
};

class AngularProfile : public Profile {
public:
    explicit AngularProfile(AngularB p);
    AngularProfile(const AngularProfile&) = delete;
    AngularProfile& operator=(const AngularProfile&) = delete;
    Jet eval(double s) const override;
    const AngularB& params() const { return p_; }
    double offset() const { return b0_; }
    double kink() const { return sc_; }
    double width() const { return w_; }

private:
    Jet half(double s) const;
    AngularB p_;
    double b0_, sc_, w_;
    std::unique_ptr<MollifiedKink> k_;
};

}  // namespace lab
