#include "slipgrip/plant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "slipgrip/detector.hpp"
#include "slipgrip/filter.hpp"
#include "synthetic_trace.hpp"

namespace slipgrip {
namespace {

ObjectState cup(double mass_kg = 0.05) {
  ObjectState obj;
  obj.mass_kg = mass_kg;
  return obj;
}

TEST(HandPlant, AtRestWithZeroDutyStaysPut) {
  HandPlant plant(HandParams{}, std::nullopt);
  const auto before = plant.state();
  for (int k = 0; k < 500; ++k) plant.step(0.0, 1e-3);
  EXPECT_NEAR(plant.state().slider_mm, before.slider_mm, 1e-9);
  for (int i = 0; i < kNumFingers; ++i) {
    EXPECT_NEAR(plant.state().finger_deg[i], before.finger_deg[i], 1e-9);
  }
}

TEST(HandPlant, PositiveDutyFlexesFingersAndAdvancesSlider) {
  HandPlant plant(HandParams{}, std::nullopt);
  double prev_slider = 0.0;
  Eigen::Array<double, kNumFingers, 1> prev_fingers = plant.state().finger_deg;
  for (int k = 0; k < 3000; ++k) {
    plant.step(0.5, 1e-3);
    ASSERT_GE(plant.state().slider_mm, prev_slider - 1e-9);
    prev_slider = plant.state().slider_mm;
    for (int i = 0; i < kNumFingers; ++i) {
      ASSERT_GE(plant.state().finger_deg[i], prev_fingers[i] - 1e-9);
    }
    prev_fingers = plant.state().finger_deg;
  }
  EXPECT_GT(plant.state().slider_mm, 2.0);
  EXPECT_GT(plant.finger_deg(Finger::kIndex), HandParams{}.rest_angle_deg + 20.0);
}

TEST(HandPlant, StickConditionHoldsLightObject) {
  HandPlant plant(HandParams{}, cup(0.05));
  for (int k = 0; k < 3000; ++k) plant.step(0.5, 1e-3);
  const auto& obj = *plant.object();
  ASSERT_GT(obj.normal_force_n, 0.5);
  ASSERT_LE(obj.tangential_load_n, obj.friction * obj.normal_force_n);
  EXPECT_DOUBLE_EQ(obj.slip_velocity_mm_s, 0.0);
  EXPECT_LT(obj.slip_displacement_mm, 0.2);
}

TEST(HandPlant, StickSlipConsistencyUnderLoadSteps) {
  HandPlant plant(HandParams{}, cup(0.05));
  Rng rng(31);
  double duty = 0.3;
  for (int k = 0; k < 8000; ++k) {
    if (k == 2000) plant.add_mass(0.4);  // provoke slip
    if (k == 5000) plant.add_mass(0.5);
    if (k % 100 == 0) duty = rng.uniform(0.2, 0.7);
    plant.step(duty, 1e-3);
    const auto& obj = *plant.object();
    const bool slipping = obj.slip_velocity_mm_s > 0.0;
    const bool overloaded = obj.tangential_load_n > obj.friction * obj.normal_force_n;
    ASSERT_EQ(slipping, overloaded) << "step " << k;
    ASSERT_GE(obj.slip_velocity_mm_s, 0.0);
  }
}

TEST(HandPlant, SlipDisplacementNonDecreasingWithinGrasp) {
  HandPlant plant(HandParams{}, cup(0.3));
  double prev_slip = 0.0;
  for (int k = 0; k < 5000; ++k) {
    plant.step(0.35, 1e-3);
    const double slip = plant.object()->slip_displacement_mm;
    ASSERT_GE(slip, prev_slip);
    prev_slip = slip;
  }
  EXPECT_GT(prev_slip, 0.0);  // a heavy object on a light grip must slide
}

TEST(HandPlant, TensionsNonNegativeAndSliderBounded) {
  HandPlant plant(HandParams{}, cup(0.1));
  Rng rng(77);
  double duty = 0.0;
  for (int k = 0; k < 10000; ++k) {
    if (k % 50 == 0) duty = rng.uniform(-0.85, 0.85);
    plant.step(duty, 1e-3);
    ASSERT_TRUE((plant.state().cable_tension_n >= 0.0).all());
    ASSERT_GE(plant.state().slider_mm, 0.0);
    ASSERT_LE(plant.state().slider_mm, plant.params().slider_max_mm);
  }
}

TEST(HandPlant, RelaxesToNeutralPostureWithoutDrive) {
  HandPlant plant(HandParams{}, std::nullopt);
  for (int k = 0; k < 2000; ++k) plant.step(0.6, 1e-3);
  ASSERT_GT(plant.finger_deg(Finger::kIndex), 40.0);
  for (int k = 0; k < 8000; ++k) plant.step(0.0, 1e-3);
  for (int i = 0; i < kNumFingers; ++i) {
    EXPECT_NEAR(plant.state().finger_deg[i], plant.params().rest_angle_deg, 0.5);
  }
  EXPECT_LT(plant.state().cable_tension_n.maxCoeff(), 0.05);
}

TEST(HandPlant, RejectsBadInputs) {
  HandPlant plant(HandParams{}, std::nullopt);
  EXPECT_THROW(plant.step(0.9, 1e-3), std::invalid_argument);
  EXPECT_THROW(plant.step(0.5, 0.02), std::invalid_argument);
  EXPECT_THROW(plant.step(0.5, 0.0), std::invalid_argument);

  HandParams bad;
  bad.cable.youngs_modulus_n_mm2 = -1.0;
  EXPECT_THROW(HandPlant(bad, std::nullopt), std::invalid_argument);
}

TEST(HandPlant, NonFiniteStateRaisesSimulationFault) {
  HandPlant plant(HandParams{}, std::nullopt);
  EXPECT_THROW(plant.step(std::nan(""), 1e-3), std::runtime_error);
}

// --- elasticity study ------------------------------------------------------

class SweepFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    rows_ = new std::vector<SweepRow>(
        adaptive_sweep(log_spaced(50.0, 10000.0, 17), HandParams{}, SweepSettings{}));
  }
  static void TearDownTestSuite() {
    delete rows_;
    rows_ = nullptr;
  }
  static std::vector<SweepRow>* rows_;
};

std::vector<SweepRow>* SweepFixture::rows_ = nullptr;

TEST_F(SweepFixture, ElasticCableGivesFullTravelAndNoBend) {
  const SweepRow& soft = rows_->front();
  EXPECT_NEAR(soft.youngs_modulus_n_mm2, 50.0, 1e-9);
  EXPECT_GT(soft.slider_travel_mm, 24.5);
  EXPECT_LT(soft.index_bend_deg, 1.5);
  EXPECT_TRUE(soft.converged);
}

TEST_F(SweepFixture, RigidCableGivesNeitherTravelNorBend) {
  const SweepRow& stiff = rows_->back();
  EXPECT_NEAR(stiff.youngs_modulus_n_mm2, 10000.0, 1e-9);
  EXPECT_LT(stiff.slider_travel_mm, 2.0);
  EXPECT_LT(stiff.index_bend_deg, 8.0);
}

TEST_F(SweepFixture, BandRowsBendWithinReportedRange) {
  int in_band = 0;
  for (const SweepRow& row : *rows_) {
    if (row.slider_travel_mm >= 3.0 && row.slider_travel_mm <= 10.0) {
      ++in_band;
      EXPECT_GE(row.index_bend_deg, 15.0) << "E = " << row.youngs_modulus_n_mm2;
      EXPECT_LE(row.index_bend_deg, 47.0) << "E = " << row.youngs_modulus_n_mm2;
    }
  }
  EXPECT_GE(in_band, 2);
}

TEST_F(SweepFixture, TravelMonotoneAndBendUnimodal) {
  for (std::size_t i = 1; i < rows_->size(); ++i) {
    EXPECT_LE((*rows_)[i].slider_travel_mm, (*rows_)[i - 1].slider_travel_mm + 1e-9);
  }
  std::size_t peak = 0;
  for (std::size_t i = 1; i < rows_->size(); ++i) {
    if ((*rows_)[i].index_bend_deg > (*rows_)[peak].index_bend_deg) peak = i;
  }
  for (std::size_t i = 1; i <= peak; ++i) {
    EXPECT_GE((*rows_)[i].index_bend_deg, (*rows_)[i - 1].index_bend_deg - 1e-9);
  }
  for (std::size_t i = peak + 1; i < rows_->size(); ++i) {
    EXPECT_LE((*rows_)[i].index_bend_deg, (*rows_)[i - 1].index_bend_deg + 1e-9);
  }
}

TEST(AdaptiveSweep, NonConvergentRowIsFlagged) {
  SweepSettings impatient;
  impatient.max_sim_time_s = 0.002;  // no time to settle
  const auto rows = adaptive_sweep({500.0}, HandParams{}, impatient);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].converged);
}

TEST(AdaptiveSweep, RejectsBadGrid) {
  EXPECT_THROW(log_spaced(0.0, 100.0, 5), std::invalid_argument);
  EXPECT_THROW(log_spaced(50.0, 10.0, 5), std::invalid_argument);
  EXPECT_THROW(log_spaced(50.0, 100.0, 1), std::invalid_argument);
}

// --- sensor front-end ------------------------------------------------------

TEST(SensorSim, QuiescentOutputStaysWithinNoiseFloor) {
  SensorSimParams params;
  SensorSim sim(params, 1000.0, 5);
  for (int k = 0; k < 5000; ++k) {
    const double v = sim.pvdf_sample(0.0, 0.0, false, false, k * 1e-3);
    ASSERT_LE(std::abs(v), 3.0 * params.pvdf.noise_floor_v);
  }
}

TEST(SensorSim, DriftIsLargeRawButRejectedByTheChain) {
  SensorSimParams params;
  SensorSim sim(params, 1000.0, 6);
  SignalChain chain(1000.0, SignalChainConfig{});
  double max_raw = 0.0, max_power = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double raw = sim.pvdf_sample(0.0, 0.0, true, false, k * 1e-3);
    const double y = chain.step(raw);
    max_raw = std::max(max_raw, std::abs(raw));
    max_power = std::max(max_power, y * y);
  }
  EXPECT_GT(max_raw, 20.0 * params.pvdf.noise_floor_v);  // far above the idle floor
  EXPECT_LT(max_power, 3.0);                             // never reaches the slip threshold
}

TEST(SensorSim, DeskVibrationIsRejectedByTheChain) {
  SensorSimParams params;
  SensorSim sim(params, 1000.0, 16);
  SignalChain chain(1000.0, SignalChainConfig{});
  double max_power = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double raw = sim.pvdf_sample(0.0, 0.0, false, true, k * 1e-3);
    const double y = chain.step(raw);
    max_power = std::max(max_power, y * y);
  }
  EXPECT_LT(max_power, 3.0);
}

TEST(SensorSim, SlipBurstCrossesThresholdWithin100ms) {
  SensorSimParams params;
  SensorSim sim(params, 1000.0, 7);
  SignalChain chain(1000.0, SignalChainConfig{});
  HysteresisDetector detector;

  double first_detect = -1.0;
  for (int k = 0; k < 2000 && first_detect < 0.0; ++k) {
    const double t = k * 1e-3;
    const bool bursting = t >= 1.0;  // slip starts at 1 s and keeps going
    const double raw =
        sim.pvdf_sample(bursting ? 12.0 : 0.0, bursting ? 3.0 : 0.0, false, false, t);
    const double y = chain.step(raw);
    if (detector.step(y * y)) first_detect = t;
  }
  ASSERT_GT(first_detect, 0.0) << "burst never detected";
  EXPECT_GE(first_detect, 1.0);
  EXPECT_LE(first_detect, 1.1);
}

TEST(SensorSim, BendReadingAnchors) {
  SensorSimParams quiet;
  quiet.bend_noise_deg = 0.0;
  SensorSim sim(quiet, 1000.0, 8);
  EXPECT_DOUBLE_EQ(sim.bend_sample(0.0), 0.0);     // flat finger reads zero
  EXPECT_DOUBLE_EQ(sim.bend_sample(20.0), -20.0);  // neutral posture reads the reference
  EXPECT_LT(sim.bend_sample(95.0), sim.bend_sample(60.0));  // monotone toward most negative

  SensorSimParams noisy;
  SensorSim noisy_sim(noisy, 1000.0, 9);
  for (int k = 0; k < 200; ++k) {
    ASSERT_NEAR(noisy_sim.bend_sample(20.0), -20.0, 6.0 * noisy.bend_noise_deg);
  }
}

TEST(SensorSim, DeterministicUnderFixedSeed) {
  SensorSimParams params;
  SensorSim a(params, 1000.0, 123);
  SensorSim b(params, 1000.0, 123);
  for (int k = 0; k < 4000; ++k) {
    const double t = k * 1e-3;
    const bool burst = (k / 500) % 2 == 1;
    const double va = a.pvdf_sample(burst ? 5.0 : 0.0, burst ? 2.0 : 0.0, true, true, t);
    const double vb = b.pvdf_sample(burst ? 5.0 : 0.0, burst ? 2.0 : 0.0, true, true, t);
    ASSERT_EQ(std::memcmp(&va, &vb, sizeof va), 0);
  }
}

TEST(SensorSim, LabeledTraceHasPlausibleScale) {
  const auto trace = testing::make_labeled_trace();
  EXPECT_EQ(trace.raw.unit, SignalUnit::kVolts);
  EXPECT_GT(trace.raw.values.abs().maxCoeff(), 1.0);
  EXPECT_LE(trace.raw.values.abs().maxCoeff(), SensorSimParams{}.output_clip_v + 1e-12);
}

}  // namespace
}  // namespace slipgrip
