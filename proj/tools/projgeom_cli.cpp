// Command-line front end: load matrices, run the pair/closure/extension
// analyses, and emit JSON or text reports.
//
// Exit codes: 0 success, 2 input/validation failure, 3 numerical
// ill-conditioning.

#include "projgeom/projgeom.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace projgeom;

struct RunConfig {
  Tolerance tol;
  std::uint64_t seed = 0;
  std::string format = "json";
};

std::string sig12(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

ProjectionMatrix load_projection(const std::string& path, const Tolerance& tol) {
  Tolerance relaxed = tol;
  relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
  const Matrix m = matrix_from_file(path);
  if (m.rows() != m.cols())
    throw ValidationError(path + ": projection must be square");
  try {
    return ProjectionMatrix(m, relaxed);
  } catch (const ValidationError& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
}

Json battery_to_json(const EquivalenceReport& rep) {
  return Json{{"norm_iterate_gap", rep.norm_iterate_gap},
              {"iterations", rep.iterations},
              {"iterate_converged", rep.iterate_converged},
              {"spectral_gap_at_1", rep.spectral_gap_at_1},
              {"c_value", rep.c_value},
              {"join_in_algebra", rep.join_in_algebra},
              {"join_residual", rep.join_residual},
              {"unit_in_algebra", rep.unit_in_algebra},
              {"unit_join_gap", rep.unit_join_gap},
              {"remark_i_value", rep.remark_i_value},
              {"remark_ii_gap", rep.remark_ii_gap},
              {"contract_ok", rep.contract_ok}};
}

int cmd_analyze_pair(const RunConfig& cfg, const std::string& p_file,
                     const std::string& q_file) {
  const ProjectionMatrix p = load_projection(p_file, cfg.tol);
  const ProjectionMatrix q = load_projection(q_file, cfg.tol);
  const TwoProjectionForm form = canonical_form(p, q, cfg.tol);
  const EquivalenceReport rep = equivalence_battery(p, q, cfg.tol);
  const int meet_rank = meet(p, q, cfg.tol).rank();
  const int join_rank = join(p, q, cfg.tol).rank();
  const bool degenerate = rep.spectral_gap_at_1 < cfg.tol.cluster_tol;

  if (cfg.format == "json") {
    Json out{{"c", rep.c_value},
             {"degenerate_angle", degenerate},
             {"meet_rank", meet_rank},
             {"join_rank", join_rank},
             {"form", form_to_json(form)},
             {"battery", battery_to_json(rep)}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "pair analysis\n"
              << "  c(p,q)           = " << sig12(rep.c_value)
              << (degenerate ? "   [degenerate angle]" : "") << "\n"
              << "  spectral gap @1  = " << sig12(rep.spectral_gap_at_1) << "\n"
              << "  meet rank        = " << meet_rank << "\n"
              << "  join rank        = " << join_rank << "\n"
              << "  corner dims      = (" << form.dim_meet << ", "
              << form.dim_p_only << ", " << form.dim_q_only << ", "
              << form.dim_neither << ")\n";
    for (const auto& gp : form.generic_params)
      std::cout << "  generic t        = " << sig12(gp.value) << "  x"
                << gp.multiplicity << "\n";
    std::cout << "  iterate gap      = " << sig12(rep.norm_iterate_gap)
              << " after " << rep.iterations << " steps\n"
              << "  join in algebra  = " << (rep.join_in_algebra ? "yes" : "no")
              << " (residual " << sig12(rep.join_residual) << ")\n"
              << "  unit = join      = " << (rep.unit_in_algebra ? "yes" : "no")
              << "\n";
  }
  return 0;
}

int cmd_family_scan(const RunConfig& cfg, const std::string& kind, int n_max) {
  if (n_max < 2)
    throw ValidationError("family-scan: N max must be >= 2");
  Json rows = Json::array();
  for (int n = 2; n <= n_max; ++n) {
    double c = 0.0;
    int meet_rank = 0;
    if (kind == "counterexample") {
      const TruncatedCounterexample tc = truncated_counterexample(n, cfg.tol);
      c = tc.report.c_value;
      meet_rank = tc.report.meet_rank;
    } else if (kind == "forbidden") {
      BlockSystem sys;
      sys.blocks = {{"b", 2 * static_cast<Eigen::Index>(n) + 2,
                     BlockKind::infinite}};
      sys.spectrum = {"x"};
      BusbyMap busby;
      busby.assignment = {{"b", "x"}};
      auto [p, pairs] = coordinate_family(sys, busby, "b", n + 1, n);
      std::vector<double> angles;
      for (int k = 1; k <= n; ++k) angles.push_back(std::cos(1.0 / k));
      const ForbiddenScanResult scan =
          forbidden_family_scan(sys, p, pairs, angles, cfg.tol);
      c = scan.c_pq;
      meet_rank = scan.meet_rank;
    } else {
      throw ValidationError("family-scan: kind must be counterexample or forbidden");
    }
    rows.push_back({{"N", n}, {"c", c}, {"meet_rank", meet_rank}});
  }
  if (cfg.format == "json") {
    std::cout << Json{{"kind", kind}, {"rows", rows}}.dump(2) << "\n";
  } else {
    std::cout << "family scan (" << kind << ")\n";
    for (const auto& row : rows)
      std::cout << "  N = " << std::setw(4) << row.at("N").get<int>()
                << "  c = " << sig12(row.at("c").get<double>())
                << "  meet rank = " << row.at("meet_rank").get<int>() << "\n";
  }
  return 0;
}

int cmd_closure(const RunConfig& cfg, const std::vector<std::string>& files) {
  std::vector<ProjectionMatrix> projections;
  std::vector<Matrix> generators;
  for (const auto& f : files) {
    projections.push_back(load_projection(f, cfg.tol));
    generators.push_back(projections.back().matrix());
  }
  const SpanAlgebra alg = SpanAlgebra::span_closure(generators, cfg.tol);
  const auto audit = angle_audit(projections, cfg.tol);

  Json algebra_json{{"ambient", alg.ambient_dim()},
                    {"dim", alg.dim()},
                    {"basis", Json::array()}};
  for (const auto& b : alg.basis())
    algebra_json["basis"].push_back(matrix_to_json(b));

  Json center_json;
  try {
    const CenterReport center = center_of(alg, cfg.tol, cfg.seed);
    center_json = Json{{"unital", true},
                       {"block_dims", center.block_dims},
                       {"central_ranks", Json::array()}};
    for (const auto& z : center.central_projections)
      center_json["central_ranks"].push_back(z.rank());
  } catch (const NotApplicableError&) {
    center_json = Json{{"unital", false}};
  }

  Json audit_json = Json::array();
  for (const auto& row : audit)
    audit_json.push_back({{"i", row.i},
                          {"j", row.j},
                          {"c", row.c_value},
                          {"spec_cardinality", row.spec_cardinality},
                          {"spectral_gap_at_1", row.spectral_gap_at_1},
                          {"degenerate", row.degenerate}});

  if (cfg.format == "json") {
    std::cout << Json{{"algebra", algebra_json},
                      {"center", center_json},
                      {"audit", audit_json}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "closure of " << files.size() << " projection(s)\n"
              << "  ambient dim = " << alg.ambient_dim() << "\n"
              << "  algebra dim = " << alg.dim() << "\n";
    if (center_json.at("unital").get<bool>()) {
      std::cout << "  block dims  =";
      for (int d : center_json.at("block_dims").get<std::vector<int>>())
        std::cout << " " << d;
      std::cout << "\n";
    } else {
      std::cout << "  not unital\n";
    }
    for (const auto& row : audit)
      std::cout << "  c(p" << row.i << ", p" << row.j
                << ") = " << sig12(row.c_value)
                << (row.degenerate ? "   [degenerate angle]" : "") << "\n";
  }
  return 0;
}

std::map<std::string, int> parse_bits(const std::vector<std::string>& raw) {
  std::map<std::string, int> bits;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected point=bit, got: " + item);
    const std::string point = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (value != "0" && value != "1")
      throw ValidationError("bit for " + point + " must be 0 or 1");
    bits[point] = value == "1" ? 1 : 0;
  }
  return bits;
}

std::map<std::string, Matrix> parse_noise(const std::vector<std::string>& raw) {
  std::map<std::string, Matrix> noise;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected label=file.json, got: " + item);
    noise[item.substr(0, eq)] = matrix_from_file(item.substr(eq + 1));
  }
  return noise;
}

int cmd_extension_lift(const RunConfig& cfg, const SystemDescription& desc,
                       const std::vector<std::string>& bits_raw,
                       const std::vector<std::string>& noise_raw) {
  const LiftResult lift =
      lift_projection(desc.system, desc.busby, parse_bits(bits_raw),
                      parse_noise(noise_raw), cfg.tol);
  if (cfg.format == "json") {
    std::cout << Json{{"projection", element_to_json(desc.system, lift.projection)},
                      {"selfadjoint_lift",
                       element_to_json(desc.system, lift.selfadjoint_lift)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "lifted projection\n";
    for (std::size_t i = 0; i < desc.system.blocks.size(); ++i)
      std::cout << "  block " << desc.system.blocks[i].label << ": scalar "
                << sig12(lift.projection.blocks[i].scalar.real())
                << ", finite rank "
                << static_cast<int>(std::lround(
                       lift.projection.blocks[i].finite.trace().real()))
                << "\n";
  }
  return 0;
}

int cmd_extension_angle(const RunConfig& cfg, const SystemDescription& desc,
                        const std::string& p_file, const std::string& q_file) {
  const ExtensionElement p = element_from_file(desc.system, p_file);
  const ExtensionElement q = element_from_file(desc.system, q_file);
  const double c = angle_in_extension(desc.system, p, q, cfg.tol);
  if (cfg.format == "json")
    std::cout << Json{{"c", c}}.dump(2) << "\n";
  else
    std::cout << "c(P,Q) = " << sig12(c) << "\n";
  return 0;
}

int cmd_extension_decompose(const RunConfig& cfg, const SystemDescription& desc,
                            const std::string& p_file) {
  const ExtensionElement p = element_from_file(desc.system, p_file);
  const auto [compact, central] = decompose_projection(desc.system, p, cfg.tol);
  if (cfg.format == "json") {
    std::cout << Json{{"compact", element_to_json(desc.system, compact)},
                      {"central", element_to_json(desc.system, central)}}
                     .dump(2)
              << "\n";
  } else {
    double compact_norm = ext_norm(desc.system, compact);
    std::cout << "decomposition P = compact + central\n"
              << "  ||compact|| = " << sig12(compact_norm) << "\n";
  }
  return 0;
}

int cmd_extension_scan(const RunConfig& cfg, const SystemDescription& desc,
                       const std::string& block, int p_rank, int family) {
  auto [p, pairs] =
      coordinate_family(desc.system, desc.busby, block, p_rank, family);
  std::vector<double> angles;
  for (int k = 1; k <= family; ++k) angles.push_back(std::cos(1.0 / k));
  const ForbiddenScanResult scan =
      forbidden_family_scan(desc.system, p, pairs, angles, cfg.tol);
  if (cfg.format == "json") {
    Json rows = Json::array();
    for (const auto& row : scan.rows)
      rows.push_back({{"c_k", row.c_k}, {"ek_qk_norm", row.ek_qk_norm}});
    std::cout << Json{{"rows", rows},
                      {"c", scan.c_pq},
                      {"p1_rank", scan.p1_rank},
                      {"meet_rank", scan.meet_rank},
                      {"meet_p1_gap", scan.meet_p1_gap}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "forbidden family scan on block " << block << "\n";
    for (const auto& row : scan.rows)
      std::cout << "  c_k = " << sig12(row.c_k)
                << "  ||e_k q_k|| = " << sig12(row.ek_qk_norm) << "\n";
    std::cout << "  c(P,Q)    = " << sig12(scan.c_pq) << "\n"
              << "  meet rank = " << scan.meet_rank << " (p1 rank "
              << scan.p1_rank << ")\n";
  }
  return 0;
}

int cmd_fixtures(const RunConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };

  const std::vector<std::pair<std::string, double>> thetas = {
      {"pi6", M_PI / 6}, {"pi4", M_PI / 4}, {"pi3", M_PI / 3},
      {"t01", 0.1},      {"t001", 0.01}};
  for (const auto& [tag, theta] : thetas) {
    const auto [p, q] = planar_pair(theta);
    matrix_to_file(p.matrix(), path("planar_" + tag + "_p.json"));
    matrix_to_file(q.matrix(), path("planar_" + tag + "_q.json"));
  }

  const TruncatedCounterexample tc = truncated_counterexample(5, cfg.tol);
  matrix_to_file(tc.p.matrix(), path("truncated_n5_p.json"));
  matrix_to_file(tc.q.matrix(), path("truncated_n5_q.json"));

  SystemDescription desc;
  desc.system.blocks = {{"b1", 6, BlockKind::infinite},
                        {"b2", 4, BlockKind::infinite},
                        {"k1", 2, BlockKind::finite}};
  desc.system.spectrum = {"x", "y"};
  desc.busby.assignment = {{"b1", "x"}, {"b2", "y"}};
  {
    std::ofstream out(path("extension_system.json"));
    out << system_to_json(desc).dump(2) << "\n";
  }
  const ExtensionElement p =
      make_projection(desc.system, desc.busby, {{"x", 1}, {"y", 0}});
  {
    std::ofstream out(path("extension_p.json"));
    out << element_to_json(desc.system, p).dump(2) << "\n";
  }

  if (cfg.format == "json")
    std::cout << Json{{"out_dir", out_dir}, {"count", 13}}.dump(2) << "\n";
  else
    std::cout << "wrote 13 fixture files to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-projection geometry and finite-scale C*-structure toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--eq-tol", cfg.tol.eq_tol, "equality tolerance");
  app.add_option("--cluster-tol", cfg.tol.cluster_tol, "spectral cluster radius");
  app.add_option("--iter-max", cfg.tol.iter_max, "iteration cap");
  app.add_option("--seed", cfg.seed, "RNG seed for randomized steps");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  std::string p_file, q_file;
  auto* analyze = app.add_subcommand("analyze-pair", "full pair analysis");
  analyze->add_option("p_file", p_file, "projection JSON")->required();
  analyze->add_option("q_file", q_file, "projection JSON")->required();

  std::string scan_kind = "counterexample";
  int scan_n_max = 0;
  auto* family = app.add_subcommand("family-scan", "N-indexed family tables");
  family->add_option("--kind", scan_kind, "counterexample|forbidden");
  family->add_option("--n-max", scan_n_max, "largest N")->required();

  std::vector<std::string> closure_files;
  auto* closure = app.add_subcommand("closure", "span closure + audit");
  closure->add_option("files", closure_files, "projection JSONs")->required();

  std::string system_file, action, ext_p_file, ext_q_file, scan_block;
  std::vector<std::string> bits_raw, noise_raw;
  int ext_p_rank = 0, ext_family = 0;
  auto* extension = app.add_subcommand("extension", "extension-model actions");
  extension->add_option("system_file", system_file, "system JSON")->required();
  extension->add_option("action", action, "lift|angle|decompose|scan")->required();
  extension->add_option("--bit", bits_raw, "abelian bit point=0|1");
  extension->add_option("--noise", noise_raw, "lift noise label=file.json");
  extension->add_option("--p-file", ext_p_file, "element JSON");
  extension->add_option("--q-file", ext_q_file, "element JSON");
  extension->add_option("--block", scan_block, "block label for scan");
  extension->add_option("--p-rank", ext_p_rank, "rank of p for scan");
  extension->add_option("--family", ext_family, "family size for scan");

  std::string out_dir = "fixtures";
  auto* fixtures = app.add_subcommand("fixtures", "write canonical fixture files");
  fixtures->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.tol.validate();
    if (analyze->parsed()) return cmd_analyze_pair(cfg, p_file, q_file);
    if (family->parsed()) return cmd_family_scan(cfg, scan_kind, scan_n_max);
    if (closure->parsed()) return cmd_closure(cfg, closure_files);
    if (extension->parsed()) {
      const SystemDescription desc = system_from_file(system_file);
      if (action == "lift")
        return cmd_extension_lift(cfg, desc, bits_raw, noise_raw);
      if (action == "angle") {
        if (ext_p_file.empty() || ext_q_file.empty())
          throw ValidationError("extension angle: --p-file and --q-file required");
        return cmd_extension_angle(cfg, desc, ext_p_file, ext_q_file);
      }
      if (action == "decompose") {
        if (ext_p_file.empty())
          throw ValidationError("extension decompose: --p-file required");
        return cmd_extension_decompose(cfg, desc, ext_p_file);
      }
      if (action == "scan") {
        if (scan_block.empty())
          throw ValidationError("extension scan: --block required");
        return cmd_extension_scan(cfg, desc, scan_block, ext_p_rank, ext_family);
      }
      throw ValidationError("extension: unknown action " + action);
    }
    if (fixtures->parsed()) return cmd_fixtures(cfg, out_dir);
  } catch (const IllConditionedError& ex) {
    std::cerr << "error (ill-conditioned): " << ex.what() << "\n";
    return 3;
  } catch (const ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const NotApplicableError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
