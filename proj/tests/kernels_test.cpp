#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "iawd/kernels.hpp"
#include "test_util.hpp"

using namespace iawd;

namespace {

QuadratureConfig tight() {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-14;
    cfg.rel_tol = 1e-11;
    cfg.max_subdivisions = 5000;
    return cfg;
}

// The three defining frequency integrals, written out independently of kernels.hpp's
// quadrature path.
struct Defining {
    FamilySpec spec;
    WeightSpec w;
    double psi(int which, double r) const {
        auto f = [&](double t) {
            const double om = weight_value(spec, w, t);
            const std::complex<double> d = stein_d(spec, t);
            const std::complex<double> rot(std::cos(t * r), -std::sin(t * r));
            switch (which) {
            case 1: return rot.real() * om;
            case 2: return std::norm(d) * rot.real() * om;
            default: return (d * rot).real() * om;
            }
        };
        const double cut = weight_cutoff(w);
        NeumaierSum s;
        const double step = std::min(cut, 1.0);
        for (double a = -cut; a < cut; a += step) s.add(integrate(f, a, std::min(cut, a + step), tight()));
        return s.value();
    }
};

FamilySpec random_spec(Family f, test::Dice& dice) {
    switch (f) {
    case Family::Poisson: return {f, {dice.uniform(0.2, 20.0)}};
    case Family::Dickman: return {f, {dice.uniform(0.2, 10.0)}};
    case Family::Gamma: return {f, {dice.uniform(0.3, 8.0), dice.uniform(0.2, 5.0)}};
    case Family::CPExp: return {f, {dice.uniform(0.3, 8.0), dice.uniform(0.2, 5.0)}};
    case Family::CPGamma: return {f, {dice.uniform(0.3, 5.0), dice.uniform(0.3, 5.0), dice.uniform(0.3, 5.0)}};
    }
    return {};
}

}  // namespace

TEST(KernelTriple, PoissonAtZero) {
    const auto k = kernel_triple({Family::Poisson, {3.0}}, WeightSpec(WeightShape::GaussFamily, 1.0));
    EXPECT_DOUBLE_EQ(k.psi1(0.0), 1.0);
    EXPECT_DOUBLE_EQ(k.psi2(0.0), 1.0);
    EXPECT_NEAR(k.psi3(0.0), 0.6065306597126334, 1e-15);
    EXPECT_EQ(k.provenance, Provenance::ClosedForm);
}

TEST(KernelTriple, GammaAtZero) {
    const auto k = kernel_triple({Family::Gamma, {2.0, 1.0}}, WeightSpec(WeightShape::GaussFamily, 1.0));
    EXPECT_DOUBLE_EQ(k.psi1(0.0), 2.0);
    EXPECT_DOUBLE_EQ(k.psi2(0.0), 1.0);
    EXPECT_DOUBLE_EQ(k.psi3(0.0), 1.0);
}

// Reference values from 30-digit quadrature of the defining integrals.
TEST(KernelTriple, CPExpFrozenValues) {
    const auto k = kernel_triple({Family::CPExp, {1.0, 2.0}}, WeightSpec(WeightShape::GaussFamily, 1.0));
    EXPECT_LT(test::rel_err(k.psi1(0.5), 20.7938332671495291800040211248), 1e-12);
    EXPECT_LT(test::rel_err(k.psi2(0.5), 3.52998761033838161145956857292), 1e-12);
    EXPECT_LT(test::rel_err(k.psi3(0.5), 9.26621747713825173008136750391), 1e-12);
}

TEST(KernelTriple, ClosedFormsMatchDefiningIntegrals) {
    test::Dice dice(2024);
    const Family closed[] = {Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp};
    for (int i = 0; i < 50; ++i) {
        const Family f = closed[i % 4];
        const FamilySpec spec = random_spec(f, dice);
        const WeightSpec w(WeightShape::GaussFamily, std::exp(dice.uniform(std::log(0.2), std::log(6.0))));
        const double r = dice.uniform(-6.0, 6.0);
        const auto k = kernel_triple(spec, w);
        const Defining def{spec, w};
        const double want[] = {def.psi(1, r), def.psi(2, r), def.psi(3, r)};
        const double got[] = {k.psi1(r), k.psi2(r), k.psi3(r)};
        for (int j = 0; j < 3; ++j) {
            const double scale = std::max(std::abs(want[j]), 1e-9 * std::abs(def.psi(j + 1, 0.0)) + 1e-300);
            EXPECT_LT(std::abs(got[j] - want[j]) / scale, 1e-6)
                << to_string(f) << " psi" << j + 1 << " r=" << r << " gamma=" << w.gamma;
        }
    }
}

TEST(KernelTriple, QuadratureKernelsMatchDefiningIntegrals) {
    test::Dice dice(77);
    const Family all[] = {Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp, Family::CPGamma};
    for (int i = 0; i < 20; ++i) {
        const Family f = all[i % 5];
        const FamilySpec spec = random_spec(f, dice);
        const WeightShape shape = (f == Family::CPGamma && i % 2 == 0) ? WeightShape::GaussFamily : WeightShape::ExpAbs;
        const WeightSpec w(shape, dice.uniform(0.25, 5.0));
        const double r = dice.uniform(-4.0, 4.0);
        const auto k = kernel_triple(spec, w);
        EXPECT_EQ(k.provenance, Provenance::Quadrature);
        const Defining def{spec, w};
        EXPECT_LT(std::abs(k.psi1(r) - def.psi(1, r)), 1e-7 * std::abs(def.psi(1, 0.0)));
        EXPECT_LT(std::abs(k.psi2(r) - def.psi(2, r)), 1e-7 * std::abs(def.psi(2, 0.0)));
        EXPECT_LT(std::abs(k.psi3(r) - def.psi(3, r)), 1e-7 * std::abs(def.psi(3, 0.0)) + 1e-12);
    }
}

TEST(KernelTriple, EvennessOfPsi1AndPsi2) {
    test::Dice dice(3);
    for (Family f : {Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp, Family::CPGamma}) {
        const auto k = kernel_triple(random_spec(f, dice), WeightSpec(WeightShape::GaussFamily, 1.3));
        for (double r : {0.1, 0.7, 2.5, 9.0}) {
            EXPECT_DOUBLE_EQ(k.psi1(r), k.psi1(-r));
            EXPECT_DOUBLE_EQ(k.psi2(r), k.psi2(-r));
        }
    }
}

TEST(KernelTriple, PureGaussianPsi1PeaksAtZero) {
    for (Family f : {Family::Poisson, Family::CPGamma}) {
        const FamilySpec spec = f == Family::Poisson ? FamilySpec{f, {2.0}} : FamilySpec{f, {1.0, 2.0, 3.0}};
        const auto k = kernel_triple(spec, WeightSpec(WeightShape::GaussFamily, 0.7));
        for (double r = -5.0; r <= 5.0; r += 0.25) EXPECT_GE(k.psi1(0.0), std::abs(k.psi1(r)));
    }
}

TEST(KernelTriple, LaplaceWeightHasNoTriple) {
    EXPECT_THROW(kernel_triple({Family::CPGamma, {1.0, 1.0, 1.0}}, WeightSpec(WeightShape::LaplaceExp, 1.0)), Error);
}

TEST(CpgPsiQuadrature, UnitParameters) {
    const auto [psi2, psi3] = cpg_psi_quadrature(1.0, 1.0, 1.0, 0.0);
    // psi2: normalised Gaussian average of (1 + t^2)^-2; psi3: int_0^inf y e^{-y^2/2 - y} dy.
    EXPECT_NEAR(psi2, 0.5, 1e-10);
    EXPECT_LT(test::rel_err(psi3, 0.344320457581201528456128769269), 1e-9);
    const double oracle = integrate_half_line([](double y) { return y * std::exp(-0.5 * y * y - y); });
    EXPECT_LT(test::rel_err(psi3, oracle), 1e-8);
}

TEST(CpgPsiQuadrature, Psi2IsEven) {
    for (double r : {0.3, 1.0, 4.0}) EXPECT_EQ(cpg_psi2(1.7, 0.4, 2.0, r), cpg_psi2(1.7, 0.4, 2.0, -r));
}

TEST(CpgPsiQuadrature, RejectsBadParameters) { EXPECT_THROW(cpg_psi_quadrature(0.0, 1.0, 1.0, 0.0), Error); }

TEST(LaplaceCoeffs, SignsOnGrid) {
    const auto c = laplace_coeffs_cpg(Params{1.0, 1.0, 1.0}, 1.0);
    for (double x : {0.1, 1.0, 10.0}) {
        EXPECT_GT(c.k2(x), 0.0) << x;
        EXPECT_LT(c.k1(x), 0.0) << x;
    }
}

// Exact values: with alpha = beta = gamma = 1 and x = 1, e(t) = (1+t)^-2 and
// k1 = -int (1+t)^2 e^{-2t} dt = -5/4, k2 = int (1+t)^4 e^{-2t} dt = 21/4.
TEST(LaplaceCoeffs, UnitParametersExact) {
    const auto c = laplace_coeffs_cpg(Params{1.0, 1.0, 1.0}, 1.0);
    EXPECT_LT(test::rel_err(c.k1(1.0), -1.25), 1e-12);
    EXPECT_LT(test::rel_err(c.k2(1.0), 5.25), 1e-12);
}

TEST(LaplaceCoeffs, MatchHalfLineQuadrature) {
    test::Dice dice(9);
    for (int i = 0; i < 30; ++i) {
        const double alpha = dice.uniform(0.05, 6.0);
        const double beta = std::exp(dice.uniform(std::log(0.005), std::log(20.0)));
        const double gamma = dice.uniform(0.1, 5.0);
        const double x = dice.uniform(0.0, 20.0);
        const auto c = laplace_coeffs_cpg(Params{1.0, alpha, beta}, gamma);
        const double z = x + gamma;
        QuadratureConfig cfg;
        cfg.rel_tol = 1e-11;
        cfg.abs_tol = 1e-300;
        cfg.max_subdivisions = 2000;
        // The integrands peak near t = (2 alpha + 2) / z, far into the tail for small
        // beta, so split there before handing the rest to the half-line rule.
        const double peak = (2.0 * alpha + 3.0) / z;
        auto split = [&](auto&& f) {
            return integrate(f, 0.0, peak, cfg) + integrate(f, peak, 4.0 * peak, cfg) +
                   integrate_half_line([&](double t) { return f(4.0 * peak + t); }, cfg, z);
        };
        const double k1 = -split([&](double t) { return std::exp(-t * z) / laplace_e(alpha, beta, t); });
        const double k2 = split([&](double t) {
            const double e = laplace_e(alpha, beta, t);
            return std::exp(-t * z) / (e * e);
        });
        EXPECT_LT(test::rel_err(c.k1(x), k1), 1e-6) << alpha << " " << beta << " " << gamma << " " << x;
        EXPECT_LT(test::rel_err(c.k2(x), k2), 1e-6) << alpha << " " << beta << " " << gamma << " " << x;
    }
}

TEST(LaplaceCoeffs, ExtremeScaleStaysFinite) {
    // Rainfall-like estimates: tiny rate, huge exponent in the prefactor.
    const auto c = laplace_coeffs_cpg(Params{0.793804619, 0.295286094, 0.008799322}, 1.0);
    for (double x : {0.0, 10.0, 200.0, 2000.0}) {
        EXPECT_TRUE(std::isfinite(c.k1(x)));
        EXPECT_TRUE(std::isfinite(c.k2(x)));
    }
}

TEST(LaplaceE, MeanAtZero) { EXPECT_DOUBLE_EQ(laplace_e(3.0, 1.5, 0.0), 2.0); }

TEST(SteinD, FamilyValues) {
    EXPECT_NEAR(std::abs(stein_d({Family::Poisson, {1.0}}, 0.3) - std::exp(std::complex<double>(0, 0.3))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(stein_d({Family::Dickman, {1.0}}, 0.0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(stein_d({Family::Gamma, {1.0, 2.0}}, 0.0) - 1.0), 0.0, 1e-15);
    // CPGamma at zero: E[Y] = alpha / beta.
    EXPECT_NEAR(std::abs(stein_d({Family::CPGamma, {1.0, 3.0, 2.0}}, 0.0) - 1.5), 0.0, 1e-15);
}
