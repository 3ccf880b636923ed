#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "relife/domain.hpp"
#include "relife/plm_store.hpp"
#include "support/generators.hpp"

namespace relife {
namespace {

using testing::fixture;

class KettleTest : public ::testing::Test {
 protected:
  void SetUp() override { catalog_ = load_catalog(fixture("kettle.json")); }
  const ProductRecord& kettle() const { return catalog_.get_product("kettle-k200"); }
  const MaterialTable& materials() const { return catalog_.materials(); }
  Catalog catalog_;
};

TEST_F(KettleTest, TotalMassMatchesTreeWalkOracle) {
  EXPECT_DOUBLE_EQ(total_mass(kettle(), materials()), oracle::kKettleTotalMass);
}

TEST_F(KettleTest, IndicesMatchOracle) {
  EXPECT_DOUBLE_EQ(recyclable_mass(kettle(), materials()), oracle::kKettleRecyclableMass);
  EXPECT_NEAR(recyclability_index(kettle(), materials()), oracle::kKettleRecyclability, 1e-12);
  EXPECT_NEAR(hazard_index(kettle(), materials()), oracle::kKettleHazard, 1e-12);
  EXPECT_NEAR(recycled_content_fraction(kettle(), materials()), oracle::kKettleRecycledContent, 1e-12);
  EXPECT_DOUBLE_EQ(total_disassembly_time(kettle()), oracle::kKettleDisassemblyTime);
  EXPECT_TRUE(has_replaceable_component(kettle()));
}

MaterialTable two_materials(double a_mass, bool a_rec, HazardClass a_haz, double b_mass, bool b_rec,
                            HazardClass b_haz) {
  MaterialTable t;
  t["a"] = {"a", "a", MaterialCategory::metal, a_haz, a_rec, 0.0, a_mass};
  t["b"] = {"b", "b", MaterialCategory::plastic, b_haz, b_rec, 0.0, b_mass};
  return t;
}

ProductRecord two_part_product() {
  ProductRecord p;
  p.product_id = "p";
  p.bom.component_id = "root";
  p.bom.subcomponents.push_back({"c1", "c1", {"a"}, {}, 1.0, false});
  p.bom.subcomponents.push_back({"c2", "c2", {"b"}, {}, 1.0, false});
  return p;
}

TEST(MassIndices, SingleLeafEqualsItsMaterialMass) {
  MaterialTable t;
  t["x"] = {"x", "x", MaterialCategory::metal, HazardClass::none, false, 0.0, 250.0};
  ProductRecord p;
  p.product_id = "p";
  p.bom = {"leaf", "leaf", {"x"}, {}, 0.0, false};
  EXPECT_DOUBLE_EQ(total_mass(p, t), 250.0);
}

TEST(MassIndices, ZeroMassProductThrows) {
  ProductRecord p;
  p.product_id = "p";
  p.bom.component_id = "empty";
  try {
    total_mass(p, {});
    recyclability_index(p, {});
    FAIL() << "expected ZeroMass";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroMass);
  }
  EXPECT_THROW(hazard_index(p, {}), Error);
}

TEST(MassIndices, RecyclabilityExamples) {
  const auto p = two_part_product();
  EXPECT_DOUBLE_EQ(recyclability_index(p, two_materials(600, true, HazardClass::none, 400, false,
                                                        HazardClass::none)),
                   0.6);
  EXPECT_DOUBLE_EQ(recyclability_index(p, two_materials(600, true, HazardClass::none, 400, true,
                                                        HazardClass::none)),
                   1.0);
  EXPECT_DOUBLE_EQ(recyclability_index(p, two_materials(600, false, HazardClass::none, 400, false,
                                                        HazardClass::none)),
                   0.0);
}

TEST(MassIndices, HazardExamples) {
  const auto p = two_part_product();
  EXPECT_DOUBLE_EQ(hazard_index(p, two_materials(200, false, HazardClass::high, 800, false,
                                                 HazardClass::none)),
                   0.2);
  EXPECT_DOUBLE_EQ(hazard_index(p, two_materials(200, false, HazardClass::none, 800, false,
                                                 HazardClass::none)),
                   0.0);
  EXPECT_DOUBLE_EQ(hazard_index(p, two_materials(200, false, HazardClass::high, 800, false,
                                                 HazardClass::high)),
                   1.0);
  EXPECT_DOUBLE_EQ(hazard_index(p, two_materials(500, false, HazardClass::low, 500, false,
                                                 HazardClass::none)),
                   0.25);
}

TEST(MassIndices, UnknownMaterialReference) {
  ProductRecord p;
  p.product_id = "p";
  p.bom = {"leaf", "leaf", {"ghost"}, {}, 0.0, false};
  try {
    total_mass(p, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownMaterial);
  }
}

TEST(MassIndices, RandomProductsStayInRange) {
  testing::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Catalog c;
    const auto p = testing::random_product(rng, c, "p");
    const auto& m = c.materials();
    const double total = total_mass(p, m);
    EXPECT_GT(total, 0.0);
    EXPECT_LE(recyclable_mass(p, m), total);
    for (double v : {recyclability_index(p, m), hazard_index(p, m), recycled_content_fraction(p, m)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

// ---------------------------------------------------------------------------
// Lifecycle stage graph

TEST(StageGraph, ForwardAndReverseEdges) {
  ProductRecord p;
  p.lifecycle_stage = LifecycleStage::use;
  EXPECT_EQ(advance_stage(p, LifecycleStage::returned).lifecycle_stage, LifecycleStage::returned);
  p.lifecycle_stage = LifecycleStage::returned;
  EXPECT_EQ(advance_stage(p, LifecycleStage::recovery).lifecycle_stage, LifecycleStage::recovery);
  EXPECT_EQ(advance_stage(p, LifecycleStage::disposal).lifecycle_stage, LifecycleStage::disposal);
}

TEST(StageGraph, IllegalEdgeCarriesTheRejectedEdge) {
  ProductRecord p;
  p.lifecycle_stage = LifecycleStage::design;
  try {
    advance_stage(p, LifecycleStage::disposal);
    FAIL() << "expected IllegalTransition";
  } catch (const IllegalTransition& e) {
    EXPECT_EQ(e.code(), ErrorCode::IllegalTransition);
    EXPECT_EQ(e.from(), LifecycleStage::design);
    EXPECT_EQ(e.to(), LifecycleStage::disposal);
  }
}

TEST(StageGraph, AdvanceChangesOnlyTheStage) {
  testing::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Catalog c;
    auto p = testing::random_product(rng, c, "p");
    for (auto next : stage_successors(p.lifecycle_stage)) {
      auto moved = advance_stage(p, next);
      EXPECT_EQ(moved.lifecycle_stage, next);
      moved.lifecycle_stage = p.lifecycle_stage;
      EXPECT_EQ(moved, p);
    }
  }
}

TEST(StageGraph, DisposalIsTerminal) {
  EXPECT_TRUE(stage_successors(LifecycleStage::disposal).empty());
  EXPECT_FALSE(stage_path(LifecycleStage::disposal, LifecycleStage::recovery).has_value());
}

TEST(StageGraph, ShortestPaths) {
  const auto path = stage_path(LifecycleStage::use, LifecycleStage::recovery);
  ASSERT_TRUE(path);
  EXPECT_EQ(*path, (std::vector<LifecycleStage>{LifecycleStage::returned, LifecycleStage::recovery}));
  EXPECT_TRUE(stage_path(LifecycleStage::use, LifecycleStage::use)->empty());
  const auto loop = stage_path(LifecycleStage::recovery, LifecycleStage::returned);
  ASSERT_TRUE(loop);
  EXPECT_EQ(loop->size(), 4u);  // production, distribution, use, returned
}

// ---------------------------------------------------------------------------
// Validation and serialization

TEST(Validation, ReturnedItemGrades) {
  ReturnedItem r{"r1", "p1", ReturnReason::defective, 4, 4, 4, 0, ""};
  EXPECT_NO_THROW(validate(r));
  r.functional_grade = 5;
  EXPECT_THROW(validate(r), Error);
  r.functional_grade = -1;
  EXPECT_THROW(validate(r), Error);
  r.functional_grade = 2;
  r.age_months = -3;
  EXPECT_THROW(validate(r), Error);
}

TEST(Validation, DuplicateComponentIdsRejected) {
  MaterialTable t;
  t["x"] = {"x", "x", MaterialCategory::metal, HazardClass::none, false, 0.0, 1.0};
  ProductRecord p;
  p.product_id = "p";
  p.bom = {"a", "a", {"x"}, {{"a", "dup", {"x"}, {}, 0.0, false}}, 0.0, false};
  EXPECT_THROW(validate(p, t), Error);
}

TEST(Validation, MaterialMassMustBePositive) {
  MaterialSpec m{"m", "m", MaterialCategory::metal, HazardClass::none, false, 0.0, 0.0};
  EXPECT_THROW(validate(m), Error);
  m.mass_g = 1.0;
  m.recycled_content_fraction = 1.5;
  EXPECT_THROW(validate(m), Error);
}

TEST(Enums, RoundTripAndRejectUnknown) {
  for (auto d : kWasteHierarchy) EXPECT_EQ(parse_disposition(to_string(d)), d);
  EXPECT_THROW(parse_disposition("landfill"), Error);
  EXPECT_EQ(parse_return_reason("usage_confusion"), ReturnReason::usage_confusion);
  EXPECT_THROW(parse_hazard_class("extreme"), Error);
}

TEST(Json, ProductRoundTrip) {
  testing::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Catalog c;
    const auto p = testing::random_product(rng, c, "p" + std::to_string(i));
    EXPECT_EQ(nlohmann::json(p).get<ProductRecord>(), p);
  }
}

TEST(Json, ReturnedItemNotesOptional) {
  const auto j = nlohmann::json::parse(R"({"return_id":"r","product_id":"p","reason":"recall",
    "cosmetic_grade":1,"functional_grade":2,"completeness_grade":3,"age_months":4})");
  const auto r = j.get<ReturnedItem>();
  EXPECT_EQ(r.notes, "");
  EXPECT_EQ(r.reason, ReturnReason::recall);
}

}  // namespace
}  // namespace relife
