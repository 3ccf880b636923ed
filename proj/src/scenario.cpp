#include "relife/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "relife/clock.hpp"
#include "relife/io.hpp"

namespace relife::scenario {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T, std::size_t N>
  T pick(const std::array<T, N>& values) {
    return values[static_cast<std::size_t>(integer(0, static_cast<int>(N) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

std::string numbered(const char* fmt, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, n);
  return buf;
}

double round_to(double x, double step) { return std::round(x / step) * step; }

constexpr std::array<MaterialCategory, 7> kMaterialCategories = {
    MaterialCategory::metal,     MaterialCategory::plastic, MaterialCategory::electronic,
    MaterialCategory::glass,     MaterialCategory::paper,   MaterialCategory::composite,
    MaterialCategory::other};
constexpr std::array<ProductCategory, 5> kProductCategories = {
    ProductCategory::appliance, ProductCategory::electronics, ProductCategory::furniture,
    ProductCategory::packaging, ProductCategory::other};
constexpr std::array<ReturnReason, 6> kReasons = {
    ReturnReason::defective,  ReturnReason::end_of_life,
    ReturnReason::end_of_use, ReturnReason::customer_dissatisfaction,
    ReturnReason::usage_confusion, ReturnReason::recall};

MaterialSpec make_material(Draw& draw, const std::string& id) {
  MaterialSpec m;
  m.material_id = id;
  m.category = draw.pick(kMaterialCategories);
  m.name = std::string(to_string(m.category)) + " part";
  const double h = draw.unit();
  m.hazard_class = h < 0.7 ? HazardClass::none : (h < 0.9 ? HazardClass::low : HazardClass::high);
  m.recyclable = draw.chance(m.category == MaterialCategory::electronic ? 0.3 : 0.65);
  m.recycled_content_fraction = m.recyclable ? round_to(draw.unit() * 0.8, 0.01) : 0.0;
  m.mass_g = static_cast<double>(draw.integer(5, 800));
  return m;
}

ProductRecord make_product(Draw& draw, int index, Catalog& catalog) {
  ProductRecord p;
  p.product_id = numbered("prod-%03d", index);
  p.category = draw.pick(kProductCategories);
  p.name = std::string(to_string(p.category)) + " model " + std::to_string(index);
  p.version = "1." + std::to_string(draw.integer(0, 4));
  p.lifecycle_stage = LifecycleStage::use;
  p.has_user_manual = draw.chance(0.8);
  p.manual_pages = p.has_user_manual ? draw.integer(4, 80) : 0;

  int material_no = 0;
  int component_no = 0;
  auto add_material = [&](ComponentNode& node) {
    const auto id = p.product_id + numbered("-m%02d", ++material_no);
    catalog.upsert_material(make_material(draw, id));
    node.materials.push_back(id);
  };
  auto make_component = [&](const std::string& label) {
    ComponentNode c;
    c.component_id = p.product_id + numbered("-c%02d", ++component_no);
    c.name = label;
    c.disassembly_time_s = static_cast<double>(draw.integer(10, 300));
    c.replaceable = draw.chance(0.5);
    return c;
  };

  p.bom = make_component("assembly");
  p.bom.replaceable = false;
  const int children = draw.integer(2, 4);
  for (int i = 0; i < children; ++i) {
    auto child = make_component("module " + std::to_string(i + 1));
    const int own = draw.integer(1, 2);
    for (int m = 0; m < own; ++m) add_material(child);
    const int grandchildren = draw.integer(0, 2);
    for (int g = 0; g < grandchildren; ++g) {
      auto leaf = make_component("part " + std::to_string(i + 1) + "." + std::to_string(g + 1));
      add_material(leaf);
      child.subcomponents.push_back(std::move(leaf));
    }
    p.bom.subcomponents.push_back(std::move(child));
  }
  return p;
}

ReturnedItem make_return(Draw& draw, int index, const std::vector<std::string>& product_ids,
                         const std::vector<ReturnedItem>& earlier) {
  ReturnedItem r;
  if (!earlier.empty() && draw.chance(0.35)) {
    r = earlier[static_cast<std::size_t>(draw.integer(0, static_cast<int>(earlier.size()) - 1))];
  } else {
    r.product_id = product_ids[static_cast<std::size_t>(
        draw.integer(0, static_cast<int>(product_ids.size()) - 1))];
    r.reason = draw.pick(kReasons);
    r.cosmetic_grade = draw.integer(0, 4);
    r.functional_grade = draw.integer(0, 4);
    r.completeness_grade = draw.integer(0, 4);
    r.age_months = draw.integer(0, 120);
  }
  r.return_id = numbered("ret-%04d", index);
  r.notes.clear();
  return r;
}

void remove_quietly(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::remove(p, ec);
}

}  // namespace

Fixture generate(const GeneratorParams& params) {
  if (params.products < 1 || params.returns < 1) {
    throw Error(ErrorCode::ValidationFailed, "products and returns must be >= 1");
  }
  Draw draw(params.seed);
  Fixture f;
  std::vector<std::string> ids;
  for (int i = 1; i <= params.products; ++i) {
    auto p = make_product(draw, i, f.catalog);
    ids.push_back(p.product_id);
    f.catalog.upsert_product(std::move(p));
  }
  for (int j = 1; j <= params.returns; ++j) {
    f.returns.push_back(make_return(draw, j, ids, f.returns));
  }
  return f;
}

nlohmann::json returns_document(const std::vector<ReturnedItem>& returns,
                                const std::optional<GeneratorParams>& params) {
  nlohmann::json doc = {{"returns", returns}};
  if (params) {
    doc["generator"] = {{"algorithm", kGeneratorAlgorithm},
                        {"seed", params->seed},
                        {"products", params->products},
                        {"returns", params->returns}};
  }
  return doc;
}

void write_fixture(const Fixture& fixture, const GeneratorParams& params,
                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  save_catalog(fixture.catalog, out_dir / "catalog.json");
  write_file_atomic(out_dir / "returns.json", dump_document(returns_document(fixture.returns, params)));
}

std::vector<ReturnedItem> parse_returns(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("returns")) throw Error(ErrorCode::ParseError, "returns document lacks 'returns'");
    list = &doc.at("returns");
  }
  auto out = decode<std::vector<ReturnedItem>>(*list, "returns");
  for (const auto& r : out) validate(r);
  return out;
}

std::vector<ReturnedItem> load_returns(const std::filesystem::path& path) {
  return parse_returns(parse_json(read_file(path), path.string()));
}

RunResult run_pipeline(Catalog catalog, const std::vector<ReturnedItem>& returns, rules::RuleSet ruleset,
                       cbr::CaseBase cases, bool auto_accept_top, const PlatformConfig& config) {
  Platform platform(std::move(catalog), std::move(cases), std::move(ruleset), DecisionLog(),
                    std::make_unique<LogicalClock>(), config);
  RunResult result;
  for (const auto& item : returns) {
    const auto rec = platform.inspect().evaluate(item);
    ReturnOutcome o;
    o.return_id = item.return_id;
    o.rationale = rec.rationale;
    o.top = rec.ranked.front().disposition;
    if (auto_accept_top) {
      platform.inspect().confirm(item.return_id, o.top);
      o.decided = o.top;
    }
    result.outcomes.push_back(std::move(o));
  }
  result.log = platform.log().entries();
  result.report = compute_report(result.log);
  result.trace_jsonl = platform.system().trace_jsonl();
  result.cases = platform.cases();
  return result;
}

int run_command(const RunOptions& o, std::ostream& err) {
  std::vector<std::filesystem::path> outputs{o.report};
  if (o.trace) outputs.push_back(*o.trace);
  if (o.log) outputs.push_back(*o.log);
  try {
    auto catalog = load_catalog(o.catalog);
    const auto returns = load_returns(o.returns);
    rules::RuleSet ruleset;
    if (o.ruleset) ruleset = rules::load_ruleset(*o.ruleset);
    cbr::CaseBase cases;
    if (o.cases && std::filesystem::exists(*o.cases)) cases = cbr::load_case_base(*o.cases);

    const auto result = run_pipeline(std::move(catalog), returns, std::move(ruleset), std::move(cases),
                                     o.auto_accept_top);
    write_file_atomic(o.report, dump_document(result.report));
    if (o.trace) write_file_atomic(*o.trace, result.trace_jsonl);
    if (o.log) write_file_atomic(*o.log, serialize_decision_log(result.log));
    if (o.cases) cbr::save_case_base(result.cases, *o.cases);
    return 0;
  } catch (const Error& e) {
    for (const auto& p : outputs) remove_quietly(p);
    err << "relife run: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    for (const auto& p : outputs) remove_quietly(p);
    err << "relife run: " << e.what() << "\n";
    return 1;
  }
}

int report_command(const std::filesystem::path& log, ReportFormat format, std::ostream& out,
                   std::ostream& err) {
  try {
    const auto entries = parse_decision_log(read_file(log));
    const auto report = compute_report(entries);
    out << (format == ReportFormat::json ? dump_document(report) : render_table(report));
    return 0;
  } catch (const std::exception& e) {
    err << "relife report: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace relife::scenario
