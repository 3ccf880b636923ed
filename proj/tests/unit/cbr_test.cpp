#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "relife/cbr.hpp"
#include "relife/plm_store.hpp"
#include "support/generators.hpp"

namespace relife::cbr {
namespace {

using relife::testing::Rng;

FeatureVector fv(std::map<std::string, std::string> cat, std::map<std::string, double> num) {
  FeatureVector v;
  v.categorical = std::move(cat);
  for (const auto& [k, x] : num) v.set_numeric(k, x);
  return v;
}

Case make_case(const std::string& id, FeatureVector problem, Disposition solution,
               const std::string& created = "2024-01-01T00:00:00Z") {
  Case c;
  c.case_id = id;
  c.problem = std::move(problem);
  c.solution = solution;
  c.created_at = created;
  return c;
}

// ---------------------------------------------------------------------------
// featurize

TEST(Featurize, BoundaryMapping) {
  Catalog catalog;
  const auto p = relife::testing::inert_product(catalog);
  const ReturnedItem item{"r", p.product_id, ReturnReason::defective, 4, 4, 4, 0, ""};
  const auto v = featurize(item, p, catalog.materials());
  EXPECT_EQ(v.categorical.at("reason"), "defective");
  EXPECT_EQ(v.categorical.at("product_category"), "appliance");
  EXPECT_EQ(v.numeric.at("cosmetic"), 1.0);
  EXPECT_EQ(v.numeric.at("functional"), 1.0);
  EXPECT_EQ(v.numeric.at("completeness"), 1.0);
  EXPECT_EQ(v.numeric.at("age"), 0.0);
  EXPECT_EQ(v.numeric.at("hazard"), 0.0);
  EXPECT_EQ(v.numeric.at("recyclability"), 1.0);
}

TEST(Featurize, AgeClamps) {
  Catalog catalog;
  const auto p = relife::testing::inert_product(catalog);
  const ReturnedItem item{"r", p.product_id, ReturnReason::defective, 0, 0, 0, 240, ""};
  EXPECT_EQ(featurize(item, p, catalog.materials()).numeric.at("age"), 1.0);
}

TEST(Featurize, KettleMatchesOracle) {
  const auto catalog = load_catalog(relife::testing::fixture("kettle.json"));
  const ReturnedItem item{"r", "kettle-k200", ReturnReason::defective, 2, 1, 3, 36, ""};
  const auto v = featurize(item, catalog.get_product("kettle-k200"), catalog.materials());
  EXPECT_EQ(v.categorical.at("reason"), "defective");
  EXPECT_EQ(v.categorical.at("product_category"), "appliance");
  EXPECT_DOUBLE_EQ(v.numeric.at("cosmetic"), oracle::kKettleCosmetic);
  EXPECT_DOUBLE_EQ(v.numeric.at("functional"), oracle::kKettleFunctional);
  EXPECT_DOUBLE_EQ(v.numeric.at("completeness"), oracle::kKettleCompleteness);
  EXPECT_DOUBLE_EQ(v.numeric.at("age"), oracle::kKettleAge);
  EXPECT_NEAR(v.numeric.at("hazard"), oracle::kKettleHazard, 1e-12);
  EXPECT_NEAR(v.numeric.at("recyclability"), oracle::kKettleRecyclability, 1e-12);
  EXPECT_EQ(v.categorical.size() + v.numeric.size(), 8u);
}

// ---------------------------------------------------------------------------
// similarity

TEST(Similarity, SelfIsOne) {
  const auto x = fv({{"reason", "recall"}}, {{"functional", 0.3}, {"age", 0.9}});
  EXPECT_EQ(similarity(x, x, {}), 1.0);
}

TEST(Similarity, DifferentSymbolsScoreZero) {
  EXPECT_EQ(similarity(fv({{"reason", "recall"}}, {}), fv({{"reason", "defective"}}, {}), {}), 0.0);
}

TEST(Similarity, WorkedExample) {
  const auto a = fv({{"reason", "defective"}}, {{"functional", 0.50}});
  const auto b = fv({{"reason", "defective"}}, {{"functional", 0.75}});
  EXPECT_EQ(similarity(a, b, {}), 0.875);
}

TEST(Similarity, OnlySharedFeaturesCount) {
  const auto a = fv({{"reason", "defective"}}, {{"functional", 0.5}, {"age", 0.0}});
  const auto b = fv({}, {{"functional", 0.5}, {"cosmetic", 1.0}});
  EXPECT_EQ(similarity(a, b, {}), 1.0);
}

TEST(Similarity, NoSharedFeatures) {
  try {
    similarity(fv({{"reason", "recall"}}, {}), fv({}, {{"age", 0.1}}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSharedFeatures);
  }
  SimilarityWeights zero;
  zero.weights["age"] = 0.0;
  EXPECT_THROW(similarity(fv({}, {{"age", 0.1}}), fv({}, {{"age", 0.2}}), zero), Error);
}

TEST(Similarity, ClampsNumericInputs) {
  FeatureVector v;
  v.set_numeric("age", 7.0);
  v.set_numeric("hazard", -2.0);
  EXPECT_EQ(v.numeric.at("age"), 1.0);
  EXPECT_EQ(v.numeric.at("hazard"), 0.0);
}

TEST(Similarity, AlgebraOverRandomPairs) {
  Rng rng(99);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto a = relife::testing::random_features(rng, true);
    const auto b = relife::testing::random_features(rng, true);
    const auto w = relife::testing::random_weights(rng);
    bool shared = false;
    const double expect = relife::testing::oracle_similarity(a, b, w, shared);
    if (!shared) {
      EXPECT_THROW(similarity(a, b, w), Error);
      continue;
    }
    const double ab = similarity(a, b, w);
    const double ba = similarity(b, a, w);
    ++compared;
    ASSERT_EQ(ab, ba) << "symmetry, pair " << i;
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_NEAR(ab, expect, 1e-12);
    ASSERT_EQ(similarity(a, a, w), 1.0);
  }
  EXPECT_GE(compared, 500);
}

// ---------------------------------------------------------------------------
// retrieve

TEST(Retrieve, EmptyBaseReturnsEmpty) {
  CaseBase base;
  EXPECT_TRUE(base.retrieve(fv({{"reason", "recall"}}, {}), {}).empty());
}

TEST(Retrieve, ExactMatchRanksFirst) {
  CaseBase base;
  const auto q = fv({{"reason", "defective"}}, {{"functional", 0.5}});
  base.retain(make_case("case-a", fv({{"reason", "defective"}}, {{"functional", 0.0}}), Disposition::recycle));
  base.retain(make_case("case-b", q, Disposition::repair));
  base.retain(make_case("case-c", fv({{"reason", "defective"}}, {{"functional", 1.0}}), Disposition::reuse));
  RetrievalParams p;
  p.k = 1;
  p.tau = 0.0;
  const auto hits = base.retrieve(q, p);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].c.case_id, "case-b");
  EXPECT_EQ(hits[0].similarity, 1.0);
}

TEST(Retrieve, TauAboveEverySimilarity) {
  CaseBase base;
  base.retain(make_case("case-a", fv({{"reason", "recall"}}, {}), Disposition::recycle));
  RetrievalParams p;
  p.tau = 0.99;
  EXPECT_TRUE(base.retrieve(fv({{"reason", "defective"}}, {}), p).empty());
}

TEST(Retrieve, TiesPreferNewerThenSmallerId) {
  CaseBase base;
  const auto q = fv({}, {{"functional", 0.5}});
  base.retain(make_case("case-3", q, Disposition::reuse, "2024-01-01T00:00:00Z"));
  base.retain(make_case("case-1", q, Disposition::resale, "2024-01-01T00:00:00Z"));
  base.retain(make_case("case-2", q, Disposition::repair, "2024-02-01T00:00:00Z"));
  RetrievalParams p;
  p.k = 3;
  const auto hits = base.retrieve(q, p);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].c.case_id, "case-2");
  EXPECT_EQ(hits[1].c.case_id, "case-1");
  EXPECT_EQ(hits[2].c.case_id, "case-3");
}

TEST(Retrieve, MatchesBruteForceOnRandomBases) {
  Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = relife::testing::uniform_int(rng, 0, trial % 10 == 0 ? 500 : 80);
    const auto base = relife::testing::random_case_base(rng, n);
    RetrievalParams p;
    p.k = relife::testing::uniform_int(rng, 1, 8);
    p.tau = relife::testing::uniform_int(rng, 0, 8) / 10.0;
    p.weights = relife::testing::random_weights(rng);
    for (int q = 0; q < 5; ++q) {
      const auto query = relife::testing::random_features(rng, relife::testing::coin(rng, 0.3));
      const auto got = base.retrieve(query, p);
      const auto want = relife::testing::oracle_retrieve(base, query, p);
      ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_EQ(got[i].c.case_id, want[i].first) << "trial " << trial << " rank " << i;
        ASSERT_EQ(got[i].similarity, want[i].second);
      }
    }
  }
}

TEST(Retrieve, RankingInvariantUnderWeightRescaling) {
  Rng rng(8080);
  for (int trial = 0; trial < 100; ++trial) {
    const auto base = relife::testing::random_case_base(rng, relife::testing::uniform_int(rng, 1, 120));
    RetrievalParams p;
    p.k = 5;
    p.tau = 0.0;
    p.weights = relife::testing::random_weights(rng);
    const auto query = relife::testing::random_features(rng);
    for (double c : {0.001, 0.5, 3.0, 1234.5}) {
      RetrievalParams scaled = p;
      scaled.weights = p.weights.scaled(c);
      const auto a = base.retrieve(query, p);
      const auto b = base.retrieve(query, scaled);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].c.case_id, b[i].c.case_id) << "c=" << c;
      if (!a.empty()) {
        EXPECT_EQ(adapt(a.front().c, query), adapt(b.front().c, query));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// retain / record_outcome

TEST(Retain, RetainedCaseIsFoundExactly) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto base = relife::testing::random_case_base(rng, relife::testing::uniform_int(rng, 0, 50));
    Case c = relife::testing::random_case(rng, 900000 + trial);
    c.created_at = "2099-01-01T00:00:00Z";  // newest, so it wins ties
    const auto r = base.retain(c);
    if (!r.retained) continue;
    RetrievalParams p;
    p.k = 1;
    p.tau = 1.0;
    const auto hits = base.retrieve(c.problem, p);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].c.case_id, c.case_id);
  }
}

TEST(Retain, NearDuplicateWithSameSolutionIsMerged) {
  CaseBase base;
  const auto q = fv({{"reason", "defective"}}, {{"functional", 0.5}});
  EXPECT_TRUE(base.retain(make_case("case-1", q, Disposition::repair)).retained);
  const auto r = base.retain(make_case("case-2", q, Disposition::repair));
  EXPECT_FALSE(r.retained);
  EXPECT_EQ(r.duplicate_of, "case-1");
  EXPECT_EQ(base.size(), 1u);
}

TEST(Retain, DistinctSolutionIsKept) {
  CaseBase base;
  const auto q = fv({{"reason", "defective"}}, {{"functional", 0.5}});
  base.retain(make_case("case-1", q, Disposition::repair));
  EXPECT_TRUE(base.retain(make_case("case-2", q, Disposition::recycle)).retained);
  EXPECT_EQ(base.size(), 2u);
}

TEST(Retain, DuplicateIdRejected) {
  CaseBase base;
  base.retain(make_case("case-1", fv({}, {{"age", 0.1}}), Disposition::repair));
  try {
    base.retain(make_case("case-1", fv({}, {{"age", 0.9}}), Disposition::dispose));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
  }
}

TEST(Retain, NoIdenticalProblemAndSolutionPairs) {
  Rng rng(31);
  CaseBase base;
  for (int i = 0; i < 400; ++i) {
    Case c = relife::testing::random_case(rng, i + 1);
    if (relife::testing::coin(rng, 0.3) && base.size() > 0) {
      c.problem = base.cases()[static_cast<std::size_t>(
                                   relife::testing::uniform_int(rng, 0, static_cast<int>(base.size()) - 1))]
                      .problem;
    }
    base.retain(c);
  }
  const auto& cs = base.cases();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      ASSERT_FALSE(cs[i].problem == cs[j].problem && cs[i].solution == cs[j].solution);
    }
  }
}

TEST(RecordOutcome, Transitions) {
  CaseBase base;
  base.retain(make_case("case-1", fv({}, {{"age", 0.1}}), Disposition::repair));
  base.record_outcome("case-1", Outcome::success);
  EXPECT_EQ(base.find("case-1")->outcome, Outcome::success);
  try {
    base.record_outcome("case-1", Outcome::failure);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlreadyResolved);
  }
  try {
    base.record_outcome("nope", Outcome::failure);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
}

// ---------------------------------------------------------------------------
// adapt

TEST(Adapt, SuccessfulCaseKeepsSolution) {
  auto c = make_case("c", {}, Disposition::repair);
  c.outcome = Outcome::success;
  EXPECT_EQ(adapt(c, fv({}, {{"functional", 0.25}})), Disposition::repair);
}

TEST(Adapt, FailedRepairStepsDownToRecycle) {
  auto c = make_case("c", {}, Disposition::repair);
  c.outcome = Outcome::failure;
  EXPECT_EQ(adapt(c, fv({}, {{"functional", 1.0}})), Disposition::recycle);
}

TEST(Adapt, LowFunctionBlocksReuseAndResale) {
  const auto low = fv({}, {{"functional", 0.5}});
  const auto high = fv({}, {{"functional", 0.75}});
  EXPECT_EQ(adapt(make_case("c", {}, Disposition::reuse), low), Disposition::repair);
  EXPECT_EQ(adapt(make_case("c", {}, Disposition::resale), low), Disposition::repair);
  EXPECT_EQ(adapt(make_case("c", {}, Disposition::reuse), high), Disposition::reuse);
  auto failed_reuse = make_case("c", {}, Disposition::reuse);
  failed_reuse.outcome = Outcome::failure;
  EXPECT_EQ(adapt(failed_reuse, high), Disposition::resale);
  EXPECT_EQ(adapt(failed_reuse, low), Disposition::repair);
}

TEST(Adapt, FallbackChainEndsAtDispose) {
  EXPECT_EQ(next_after_failure(Disposition::recycle), Disposition::dispose);
  EXPECT_EQ(next_after_failure(Disposition::dispose), Disposition::dispose);
  EXPECT_EQ(next_after_failure(Disposition::redesign), Disposition::recycle);
}

// ---------------------------------------------------------------------------
// persistence

TEST(CaseBaseFiles, RandomBasesRoundTrip) {
  Rng rng(5150);
  relife::testing::TempDir dir;
  for (int i = 0; i < 200; ++i) {
    const auto base = relife::testing::random_case_base(rng, relife::testing::uniform_int(rng, 0, 40));
    save_case_base(base, dir / "cases.json");
    const auto back = load_case_base(dir / "cases.json");
    ASSERT_EQ(back, base) << "instance " << i;
    ASSERT_EQ(serialize_case_base(back), serialize_case_base(base));
  }
}

TEST(CaseBaseFiles, NextCaseIdSkipsUsedIds) {
  CaseBase base;
  EXPECT_EQ(base.next_case_id(), "case-000001");
  base.retain(make_case(base.next_case_id(), fv({}, {{"age", 0.0}}), Disposition::reuse));
  EXPECT_EQ(base.next_case_id(), "case-000002");
}

}  // namespace
}  // namespace relife::cbr
