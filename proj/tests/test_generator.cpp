#include <gtest/gtest.h>

#include <vector>

#include "ntc/generator.hpp"
#include "ntc/io.hpp"
#include "ntc/objective.hpp"
#include "ntc/solver.hpp"

using namespace ntc;

TEST(Generator, DeterministicBytes) {
  GeneratorSpec spec;
  spec.shape = Shape({4, 3, 2});
  spec.rank = 2;
  spec.n = 30;
  spec.noise_sd = 0.1;
  spec.seed = 77;
  const GeneratedInstance a = generate(spec);
  const GeneratedInstance b = generate(spec);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(instance_to_json(a).dump(), instance_to_json(b).dump());
}

TEST(Generator, EnumerationModeCoversEveryEntryOnce) {
  GeneratorSpec spec;
  spec.shape = Shape({3, 2, 2});
  spec.rank = 1;
  spec.n = spec.shape.pi();
  spec.enumerate_all = true;
  spec.seed = 5;
  const GeneratedInstance inst = generate(spec);
  const ObservedData data = inst.observed();
  EXPECT_EQ(data.n(), spec.shape.pi());
  EXPECT_EQ(data.u(), static_cast<int>(spec.shape.pi()));
  for (int t = 0; t < data.u(); ++t) EXPECT_EQ(data.multiplicity(t), 1);
  // Wrong n is rejected.
  GeneratorSpec bad = spec;
  bad.n = 5;
  EXPECT_THROW(generate(bad), std::invalid_argument);
}

TEST(Generator, LambdaBoundsTruth) {
  GeneratorSpec spec;
  spec.shape = Shape({5, 4, 3});
  spec.rank = 3;
  spec.n = 10;
  spec.seed = 9;
  const GeneratedInstance inst = generate(spec);
  double max_entry = 0.0;
  for (double v : inst.truth) {
    EXPECT_GE(v, 0.0);
    max_entry = std::max(max_entry, v);
  }
  EXPECT_DOUBLE_EQ(inst.lambda, 3.0 * max_entry);
}

TEST(Generator, NoiselessSamplesMatchTruth) {
  GeneratorSpec spec;
  spec.shape = Shape({4, 4});
  spec.rank = 2;
  spec.n = 25;
  spec.seed = 13;
  const GeneratedInstance inst = generate(spec);
  for (const Observation& obs : inst.samples) {
    EXPECT_DOUBLE_EQ(
        obs.value,
        inst.truth[static_cast<std::size_t>(
            inst.spec.shape.linear_index(obs.index))]);
  }
}

// Exact-recovery smoke test: a noiseless rank-1 instance solves to tiny
// NMSE.
TEST(Generator, RankOneNoiselessRecovers) {
  GeneratorSpec spec;
  spec.shape = Shape({5, 5, 5});
  spec.rank = 1;
  spec.n = 300;
  spec.noise_sd = 0.0;
  spec.seed = 21;
  const GeneratedInstance inst = generate(spec);
  const ObservedData data = inst.observed();
  const SolveResult res =
      solve(data, inst.lambda, 1e-6, make_variant(1), 400);
  EXPECT_LT(res.objective, 1e-6);
  EXPECT_LT(nmse(res.completed, inst.truth), 1e-3);
}

TEST(Generator, MetaRoundTripThroughJson) {
  GeneratorSpec spec;
  spec.shape = Shape({3, 3});
  spec.rank = 2;
  spec.n = 12;
  spec.noise_sd = 0.05;
  spec.seed = 31;
  const GeneratedInstance inst = generate(spec);
  const LoadedInstance loaded = instance_from_json(instance_to_json(inst));
  ASSERT_TRUE(loaded.meta.has_value());
  EXPECT_EQ(loaded.meta->rank, 2);
  EXPECT_EQ(loaded.meta->lambda, inst.lambda);
  EXPECT_EQ(loaded.meta->rebuild_truth(loaded.shape), inst.truth);
  const ObservedData data = loaded.observed();
  EXPECT_EQ(data.n(), 12);
}
