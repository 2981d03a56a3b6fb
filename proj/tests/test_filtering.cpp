#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "olfact/cancellation.hpp"
#include "olfact/error.hpp"
#include "olfact/filtering.hpp"
#include "support.hpp"

using namespace olfact;
using olfact::test::gaussian;
using olfact::test::gaussian_vec;

namespace {

FilterProblem random_filter(std::mt19937_64& rng, Index l, Index k, Index n) {
  FilterProblem p;
  p.map = test::make_map(gaussian(l, k, rng));
  p.dict = test::make_dict(gaussian(k, n, rng));
  p.x_in = gaussian_vec(k, rng);
  p.y_des = gaussian_vec(l, rng);
  return p;
}

EnvironmentScenario stationary(const FilterProblem& p, long steps) {
  EnvironmentScenario s;
  s.segments.push_back({steps, p.x_in, p.y_des});
  return s;
}

}  // namespace

TEST(Filter, TargetAlreadyMetNeedsNothing) {
  std::mt19937_64 rng(1);
  FilterProblem p = random_filter(rng, 5, 4, 6);
  p.y_des = predict_compound(p.map, p.x_in);
  for (double mu : {0.0, 0.3}) {
    p.mu = mu;
    const auto sol = solve_filter(p);
    EXPECT_TRUE(sol.weights.isZero(0.0));
    EXPECT_LE(sol.residual_l2, 1e-12);
  }
}

TEST(Filter, ZeroTargetIsSingleOdorCancellation) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    FilterProblem f = random_filter(rng, 6, 4, 8);
    f.y_des.setZero();
    CancellationProblem c;
    c.map = f.map;
    c.dict = f.dict;
    c.y_mal = predict_compound(f.map, f.x_in);
    c.mu = 0.1 * (t + 1);
    // Unhalved filter objective: same minimizer at twice the weight.
    f.mu = 2.0 * c.mu;
    f.regularizer = Regularizer::l1;
    const auto fs = solve_filter(f);
    const auto cs = solve_cancellation(c);
    EXPECT_LE((fs.weights - cs.w.col(0)).cwiseAbs().maxCoeff(), 1e-9) << t;
    EXPECT_NEAR(fs.objective, 2.0 * cs.objective, 1e-9 * (1.0 + fs.objective));
  }
}

TEST(Filter, ReachableTargetIsHit) {
  std::mt19937_64 rng(3);
  FilterProblem p = random_filter(rng, 5, 6, 8);
  Vector w_true = Vector::Zero(8);
  w_true(2) = 0.7;
  w_true(5) = 1.3;
  p.y_des = predict_compound(p.map, p.x_in) + dictionary_percepts(p.map, p.dict) * w_true;
  p.mu = 0.0;
  EXPECT_LE(solve_filter(p).residual_l2, 1e-8);
}

TEST(Filter, RejectsBadProblems) {
  std::mt19937_64 rng(4);
  FilterProblem p = random_filter(rng, 5, 4, 6);
  p.x_in = Vector::Zero(3);
  EXPECT_THROW(solve_filter(p), DimensionMismatch);
  p.x_in = Vector::Zero(4);
  p.y_des = Vector::Zero(4);
  EXPECT_THROW(solve_filter(p), DimensionMismatch);
  p.y_des = Vector::Zero(5);
  p.mu = -0.1;
  EXPECT_THROW(solve_filter(p), InvalidConfig);
}

TEST(Lms, ScalarStep) {
  const PerceptualMap map = test::make_map(Matrix::Ones(1, 1));
  const Dictionary dict = test::make_dict(Matrix::Ones(1, 1));
  const Vector w = Vector::Constant(1, 0.5);
  const Vector next = lms_step(w, Vector::Constant(1, -1.0), Vector::Zero(1), dict, map, 0.1, 0.0);
  EXPECT_NEAR(next(0), 0.55, 1e-15);
}

TEST(Lms, ZeroIsAbsorbing) {
  std::mt19937_64 rng(5);
  const Matrix d = gaussian(5, 4, rng);
  Vector w = test::uniform(4, 1, rng, 0.1, 1.0).col(0);
  w(2) = 0.0;
  for (int t = 0; t < 50; ++t) {
    w = lms_update(w, gaussian_vec(5, rng), gaussian_vec(5, rng), d, 0.01, 0.1).w;
    EXPECT_EQ(w(2), 0.0);
  }
}

TEST(Lms, ZeroResidualIsFixedPoint) {
  std::mt19937_64 rng(6);
  const Matrix d = gaussian(5, 4, rng);
  const Vector w = test::uniform(4, 1, rng, 0.1, 1.0).col(0);
  const Vector y_in = gaussian_vec(5, rng);
  const Vector y_des = y_in + d * w;
  EXPECT_LE((lms_update(w, y_in, y_des, d, 0.3, 0.0).w - w).norm(), 1e-14);
}

TEST(Lms, ClampKeepsWeightsNonnegative) {
  std::mt19937_64 rng(7);
  const Matrix d = gaussian(5, 6, rng);
  long clamps = 0;
  for (int t = 0; t < 100; ++t) {
    const Vector w = test::uniform(6, 1, rng, 0.1, 2.0).col(0);
    const LmsUpdate u = lms_update(w, gaussian_vec(5, rng), gaussian_vec(5, rng), d, 5.0, 0.5);
    EXPECT_GE(u.w.minCoeff(), 0.0);
    clamps += u.clamped;
  }
  EXPECT_GT(clamps, 0);
}

TEST(Lms, RegularizerTerms) {
  const Matrix d = Matrix::Identity(2, 2);
  const Vector w = (Vector(2) << 1.0, 0.0).finished();
  const Vector y = Vector::Zero(2);
  // direction = D^T r + mu*dJ with r = D w.
  EXPECT_NEAR(lms_update(w, y, y, d, 0.1, 0.5, Regularizer::l1).w(0), 1.0 - 0.2 * 1.5, 1e-15);
  EXPECT_NEAR(lms_update(w, y, y, d, 0.1, 0.5, Regularizer::l2sq).w(0), 1.0 - 0.2 * 2.0, 1e-15);
  EXPECT_NEAR(lms_update(w, y, y, d, 0.1, 0.5, Regularizer::none).w(0), 1.0 - 0.2, 1e-15);
  EXPECT_THROW(lms_update(w, y, Vector::Zero(3), d, 0.1, 0.5), DimensionMismatch);
}

TEST(Lms, FixedPointIsStationary) {
  std::mt19937_64 rng(8);
  FilterProblem p = random_filter(rng, 7, 5, 3);
  const Matrix d = dictionary_percepts(p.map, p.dict);
  const Vector w_star = test::uniform(3, 1, rng, 0.2, 1.0).col(0);
  // Residual component orthogonal to range(D).
  Vector r = gaussian_vec(7, rng);
  r -= d * d.colPivHouseholderQr().solve(r);
  p.y_des = predict_compound(p.map, p.x_in) + d * w_star + r;
  const Vector next = lms_step(w_star, p.x_in, p.y_des, p.dict, p.map, 0.05, 0.0);
  EXPECT_LE((next - w_star).cwiseAbs().maxCoeff(), 1e-12);
  const Vector grad = d.transpose() * (predict_compound(p.map, p.x_in) + d * w_star - p.y_des);
  EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-8);
  // The batch filter lands on the same point.
  EXPECT_LE((solve_filter(p).weights - w_star).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Lms, StepBound) {
  std::mt19937_64 rng(9);
  const Matrix d = gaussian(6, 4, rng);
  const Vector w0 = (Vector(4) << 0.1, 0.4, 0.2, 0.3).finished();
  const double s = Eigen::JacobiSVD<Matrix>(d).singularValues()(0);
  EXPECT_NEAR(lms_step_bound(d, w0), 1.0 / (2.0 * 0.4 * s * s), 1e-12);
  EXPECT_TRUE(std::isinf(lms_step_bound(Matrix::Zero(6, 4), w0)));
  EXPECT_EQ(uniform_start(4), Vector::Constant(4, 0.25));
}

TEST(Adaptive, StationaryRunApproachesBatch) {
  for (std::uint64_t seed : {10, 11, 12}) {
    std::mt19937_64 rng(seed);
    FilterProblem p = random_filter(rng, 8, 6, 4);
    const auto batch = solve_filter(p);
    ASSERT_GT(batch.residual_l2, 1e-3);
    const Vector w0 = uniform_start(4);
    const double eta = 0.5 * lms_step_bound(dictionary_percepts(p.map, p.dict), w0);
    const AdaptiveRun run = run_adaptive(stationary(p, 10000), p.dict, p.map, eta, 0.0, w0);
    ASSERT_EQ(run.residual_trajectory.size(), 10000u);
    EXPECT_LE(run.residual_trajectory.back(), 1.05 * batch.residual_l2) << seed;
    for (const auto& w : run.w_trajectory) EXPECT_GE(w.minCoeff(), 0.0);
  }
}

TEST(Adaptive, SmallStepsDescend) {
  std::mt19937_64 rng(13);
  FilterProblem p = random_filter(rng, 6, 5, 5);
  const Vector w0 = uniform_start(5);
  const double eta = 0.1 * lms_step_bound(dictionary_percepts(p.map, p.dict), w0);
  const AdaptiveRun run = run_adaptive(stationary(p, 100), p.dict, p.map, eta, 0.0, w0);
  for (std::size_t t = 1; t < run.residual_trajectory.size(); ++t)
    EXPECT_LE(run.residual_trajectory[t], run.residual_trajectory[t - 1] + 1e-12) << t;
}

TEST(Adaptive, SegmentSwitchSpikesThenRecovers) {
  std::mt19937_64 rng(14);
  FilterProblem p = random_filter(rng, 6, 5, 8);
  FilterProblem q = p;
  q.x_in = 3.0 * gaussian_vec(5, rng);
  EnvironmentScenario s;
  s.segments.push_back({500, p.x_in, p.y_des});
  s.segments.push_back({500, q.x_in, q.y_des});
  const Vector w0 = uniform_start(8);
  const double eta = 0.2 * lms_step_bound(dictionary_percepts(p.map, p.dict), w0);
  const AdaptiveRun run = run_adaptive(s, p.dict, p.map, eta, 0.0, w0);
  const auto& r = run.residual_trajectory;
  EXPECT_GT(r[500], r[499]);
  int down = 0;
  for (std::size_t t = 501; t < r.size(); ++t) down += r[t] <= r[t - 1];
  EXPECT_GE(down, static_cast<int>(0.8 * 499));
}

TEST(Adaptive, JitteredRunsAreDeterministic) {
  std::mt19937_64 rng(15);
  FilterProblem p = random_filter(rng, 6, 5, 4);
  EnvironmentScenario s = stationary(p, 200);
  s.seed = 99;
  s.jitter_sigma = 0.1;
  const Vector w0 = uniform_start(4);
  const double eta = 0.3 * lms_step_bound(dictionary_percepts(p.map, p.dict), w0);
  const AdaptiveRun a = run_adaptive(s, p.dict, p.map, eta, 0.05, w0);
  const AdaptiveRun b = run_adaptive(s, p.dict, p.map, eta, 0.05, w0);
  EXPECT_EQ(a.final_w, b.final_w);
  EXPECT_EQ(a.residual_trajectory, b.residual_trajectory);
  s.seed = 100;
  EXPECT_NE(run_adaptive(s, p.dict, p.map, eta, 0.05, w0).final_w, a.final_w);
}

TEST(Adaptive, FrozenCoordinatesAreReported) {
  std::mt19937_64 rng(16);
  FilterProblem p = random_filter(rng, 6, 5, 4);
  Vector w0 = uniform_start(4);
  w0(1) = 0.0;
  EXPECT_THROW(run_adaptive(stationary(p, 10), p.dict, p.map, 0.01, 0.0, w0), InvalidConfig);
  const AdaptiveRun run =
      run_adaptive(stationary(p, 10), p.dict, p.map, 0.01, 0.0, w0, {.allow_frozen = true});
  ASSERT_FALSE(run.frozen.empty());
  EXPECT_EQ(run.frozen.front(), 1);
  for (const auto& w : run.w_trajectory) EXPECT_EQ(w(1), 0.0);
}

TEST(Adaptive, RejectsBadInputs) {
  std::mt19937_64 rng(17);
  FilterProblem p = random_filter(rng, 6, 5, 4);
  const Vector w0 = uniform_start(4);
  EXPECT_THROW(run_adaptive(stationary(p, 10), p.dict, p.map, 0.0, 0.0, w0), InvalidConfig);
  EXPECT_THROW(run_adaptive(stationary(p, 10), p.dict, p.map, 0.1, -1.0, w0), InvalidConfig);
  EXPECT_THROW(run_adaptive(stationary(p, 10), p.dict, p.map, 0.1, 0.0, uniform_start(3)),
               DimensionMismatch);
  EXPECT_THROW(run_adaptive(stationary(p, 0), p.dict, p.map, 0.1, 0.0, w0), InvalidConfig);
  EXPECT_THROW(run_adaptive({}, p.dict, p.map, 0.1, 0.0, w0), InvalidConfig);
  Vector neg = w0;
  neg(0) = -0.1;
  EXPECT_THROW(run_adaptive(stationary(p, 10), p.dict, p.map, 0.1, 0.0, neg), InvalidConfig);
  EnvironmentScenario bad = stationary(p, 10);
  bad.segments[0].x_in = Vector::Zero(2);
  EXPECT_THROW(run_adaptive(bad, p.dict, p.map, 0.1, 0.0, w0), DimensionMismatch);
}
