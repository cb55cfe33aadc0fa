// pcf: command-line driver for the p.c.f. Dirichlet-form library.
//
// Exit codes: 0 success, 1 mathematical or validation failure, 2 parse or I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcf.hpp"

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string structure;
  std::string depth_range;
  int depth = -1;
  std::string family = "harmonic";
  std::vector<double> weights;
  std::vector<double> mu;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
  double tau_rank = pcf::default_tolerances().tau_rank;
  double mass_floor = pcf::default_tolerances().mass_floor;

  // measure
  std::vector<double> f_values;
  std::vector<double> g_values;
  int f_level = 0;
  // scan
  std::string cells_out;
  // embed
  std::string vertices_out;
  // chainrule
  std::string poly;
  // validate
  std::size_t samples = 1000;
};

void add_common(CLI::App* cmd, Options& o, bool with_family) {
  cmd->add_option("--structure", o.structure, "structure file (JSON)")->required();
  cmd->add_option("--mu", o.mu, "self-similar measure weights, one per letter (default uniform)")
      ->delimiter(',');
  cmd->add_option("--seed", o.seed, "seed for sampled estimates");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--mass-floor", o.mass_floor, "skip cells below this fraction of the total mass")
      ->check(CLI::PositiveNumber);
  if (with_family) {
    cmd->add_option("--family", o.family, "harmonic | level1 | file:PATH");
    cmd->add_option("--weights", o.weights, "family weights a_i (default uniform)")->delimiter(',');
    cmd->add_option("--tau-rank", o.tau_rank, "eigenvalue threshold for the dimension estimate")
        ->check(CLI::PositiveNumber);
  }
}

/// "A..B" or a single integer.
std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    if (lo > hi) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw pcf::ParseError("depth range '" + text + "' is not of the form A..B");
  }
}

std::pair<int, int> depths(const Options& o, int fallback) {
  std::pair<int, int> r{fallback, fallback};
  if (!o.depth_range.empty()) r = parse_range(o.depth_range);
  else if (o.depth >= 0) r = {o.depth, o.depth};
  if (r.first < 0) throw pcf::ParseError("depth must be nonnegative");
  return r;
}

pcf::ModelPtr load_model(const Options& o) {
  pcf::Tolerances tol = pcf::default_tolerances();
  tol.mass_floor = o.mass_floor;
  tol.tau_rank = o.tau_rank;
  return pcf::Model::create(pcf::load_structure(o.structure), tol);
}

pcf::MeanFunctional mean_of(const pcf::Model& model, const Options& o) {
  return pcf::mean_functional(model, o.mu.empty() ? pcf::uniform_weights(model.alphabet_size()) : o.mu);
}

pcf::FunctionFamily family_of(const pcf::ModelPtr& model, const pcf::MeanFunctional& mean, const Options& o) {
  pcf::FunctionFamily fam = [&] {
    if (o.family == "harmonic") return pcf::harmonic_family(model, mean);
    if (o.family == "level1") return pcf::level1_family(model, mean);
    if (o.family.rfind("file:", 0) == 0) return pcf::load_family(model, mean, o.family.substr(5), o.weights);
    throw pcf::ParseError("unknown family '" + o.family + "' (harmonic | level1 | file:PATH)");
  }();
  if (!o.weights.empty() && o.family.rfind("file:", 0) != 0)
    fam = pcf::make_family(fam.members, o.weights, fam.labels);
  return fam;
}

/// Runs `emit` against the --out file, or stdout when none is given.
template <class Fn>
void with_output(const std::string& path, Fn&& emit) {
  if (path.empty() || path == "-") {
    emit(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  emit(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + pcf::csv::num(v(i));
  return s + ")";
}

int cmd_validate(const Options& o) {
  const auto spec = pcf::load_structure(o.structure);
  std::ostringstream os;
  os << "structure " << spec.name << ": N = " << spec.alphabet_size << ", d = " << spec.boundary_size()
     << ", |V_1| = " << spec.level1_class_count << "\n";
  os << "gluing: consistent, fixed points labelled, level-1 cell graph connected\n";
  for (const auto& note : spec.unchecked_assumptions) os << "unchecked: " << note << "\n";

  pcf::Tolerances tol = pcf::default_tolerances();
  tol.mass_floor = o.mass_floor;
  const auto model = pcf::Model::create(spec, tol);
  const auto& h = model->harmonic();
  os << "laplacian: (D1) (D2) (D3) hold\n";
  os << "fixed-point residual: " << pcf::csv::num(h.fixed_point_residual) << "\n";
  for (int p = 0; p < spec.boundary_size(); ++p) {
    const auto e = pcf::eigen_data(h, spec, p, tol);
    os << "p" << p + 1 << " (letter " << e.letter << ", r = " << pcf::csv::num(e.rate) << ")\n";
    os << "  u = " << vec(e.u) << "  |A^t u - r u| = " << pcf::csv::num(e.transpose_residual) << "\n";
    os << "  v = " << vec(e.v) << "  q = " << pcf::csv::num(e.quadratic) << "\n";
    os << "  spectrum:";
    for (const auto& z : e.spectrum) {
      os << ' ' << pcf::csv::num(z.real());
      if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << pcf::csv::num(z.imag()) << "i";
    }
    os << "\n";
  }
  const auto mean = mean_of(*model, o);
  const auto delta = pcf::estimate_delta(*model, mean, o.samples, 20, o.seed);
  const auto sample = pcf::sample_k_set(*model, mean, o.samples, o.seed);
  os << "delta estimate (sampled, not certified): " << pcf::csv::num(delta.value) << "\n";
  os << "c_1 estimate (sampled, not certified): " << pcf::csv::num(pcf::estimate_ck(*model, sample, 1)) << "\n";
  os << "ok\n";
  with_output(o.out, [&](std::ostream& out) { out << os.str(); });
  return 0;
}

pcf::PiecewiseHarmonic function_from(const pcf::ModelPtr& model, int level, const std::vector<double>& values) {
  return pcf::interpolate(model, level,
                          Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

int cmd_measure(const Options& o) {
  const auto model = load_model(o);
  const int n = depths(o, 0).first;
  if (o.f_values.empty()) throw pcf::ParseError("--f is required");
  const auto f = function_from(model, o.f_level, o.f_values);
  const auto g = o.g_values.empty() ? f : function_from(model, o.f_level, o.g_values);
  const auto table = pcf::measure_table(f, g, n, o.workers);

  // Identities checked before anything is written.
  const double expected = 2.0 * pcf::energy(f, g);
  const double scale = std::max({1.0, std::abs(expected)});
  if (std::abs(table.total - expected) > model->tolerances().consistency * scale)
    throw pcf::NumericalError("total mass " + pcf::csv::num(table.total) + " differs from 2E(f,g) = " +
                              pcf::csv::num(expected));
  bool refinable = true;
  try {
    pcf::cell_count(model->alphabet_size(), static_cast<std::size_t>(std::max(n, o.f_level) + 1),
                    model->tolerances().max_cells);
  } catch (const std::overflow_error&) {
    refinable = false;
  }
  if (refinable) {
    const auto fine = pcf::measure_table(f, g, n + 1, o.workers);
    const auto up = pcf::detail::aggregate_up(fine.masses, model->alphabet_size(), 1);
    for (std::size_t c = 0; c < up.size(); ++c)
      if (std::abs(up[c] - table.masses[c]) > model->tolerances().consistency * scale)
        throw pcf::NumericalError("consistency fails at cell " +
                                  pcf::to_string(pcf::word_from_index(c, static_cast<std::size_t>(n),
                                                                      model->alphabet_size())));
  }
  with_output(o.out, [&](std::ostream& out) { pcf::csv::write_measure(out, table); });
  return 0;
}

int cmd_scan(const Options& o) {
  const auto model = load_model(o);
  const auto mean = mean_of(*model, o);
  const auto fam = family_of(model, mean, o);
  const auto [lo, hi] = depths(o, 2);

  std::optional<std::ofstream> cells;
  if (!o.cells_out.empty()) {
    cells.emplace(o.cells_out);
    if (!*cells) throw IoError("cannot open '" + o.cells_out + "' for writing");
    pcf::csv::write_cells_header(*cells, static_cast<Eigen::Index>(fam.size()));
  }
  std::vector<pcf::RankProfile> rows;
  for (int n = lo; n <= hi; ++n)
    rows.push_back(pcf::scan_profile(fam, n, o.tau_rank, o.workers, [&](const pcf::DensityMatrixField& part) {
      pcf::check_density_invariants(part, model->tolerances());
      if (cells) pcf::csv::write_cells(*cells, part);
    }));
  if (cells) {
    cells->flush();
    if (!*cells) throw IoError("failed writing '" + o.cells_out + "'");
  }
  with_output(o.out, [&](std::ostream& out) {
    pcf::csv::write_profile_header(out);
    for (const auto& r : rows) pcf::csv::write_profile_row(out, r);
  });
  const auto& last = rows.back();
  std::fprintf(stderr, "family %s (k = %zu), depth %d: dimension estimate %.6f, %zu cells skipped\n",
               o.family.c_str(), fam.size(), last.depth, last.dimension_estimate, last.skipped_cells);
  return 0;
}

int cmd_embed(const Options& o) {
  const auto model = load_model(o);
  const auto mean = mean_of(*model, o);
  const auto fam = family_of(model, mean, o);
  const int m = depths(o, 4).first;
  const auto table = pcf::embed(fam.members, fam.weights, m, o.workers);
  if (!table.coincident.empty())
    std::fprintf(stderr, "warning: embedding is not injective on V_%d (%zu coincident vertex pairs, first %d and %d)\n",
                 m, table.coincident.size(), table.coincident.front().first, table.coincident.front().second);
  with_output(o.out, [&](std::ostream& out) { pcf::csv::write_embedding_cells(out, table); });
  if (!o.vertices_out.empty())
    with_output(o.vertices_out, [&](std::ostream& out) { pcf::csv::write_embedding_vertices(out, table); });
  return 0;
}

int cmd_chainrule(const Options& o) {
  const auto model = load_model(o);
  const auto mean = mean_of(*model, o);
  const auto fam = family_of(model, mean, o);
  if (o.poly.empty()) throw pcf::ParseError("--poly is required");
  const auto g = pcf::parse_polynomial(o.poly, static_cast<int>(fam.size()));
  const auto [lo, hi] = depths(o, 3);
  std::vector<pcf::ChainRuleRow> rows;
  for (int m = lo; m <= hi; ++m) rows.push_back(pcf::chain_rule(fam.members, g, m, o.workers));
  with_output(o.out, [&](std::ostream& out) { pcf::csv::write_chain_rule(out, rows); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet forms, energy measures and rank-one diagnostics on p.c.f. fractals"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "check a structure and print its harmonic data");
  add_common(validate, o, false);
  validate->add_option("--samples", o.samples, "samples for the delta and c_1 estimates")->check(CLI::PositiveNumber);

  auto* measure = app.add_subcommand("measure", "cell masses lambda<f,g>(Sigma_w) at one depth");
  add_common(measure, o, false);
  measure->add_option("--depth", o.depth, "word length n");
  measure->add_option("--f", o.f_values, "values of f on V_m (comma separated)")->delimiter(',');
  measure->add_option("--g", o.g_values, "values of g on V_m (default: g = f)")->delimiter(',');
  measure->add_option("--f-level", o.f_level, "level m of the given values");

  auto* scan = app.add_subcommand("scan", "rank profile of the density matrices over a depth range");
  add_common(scan, o, true);
  scan->add_option("--depths", o.depth_range, "depth range A..B");
  scan->add_option("--depth", o.depth, "single depth");
  scan->add_option("--cells-out", o.cells_out, "per-cell CSV");

  auto* embed = app.add_subcommand("embed", "harmonic embedding and per-cell metric");
  add_common(embed, o, true);
  embed->add_option("--depth", o.depth, "depth m");
  embed->add_option("--vertices-out", o.vertices_out, "vertex coordinate CSV");

  auto* chain = app.add_subcommand("chainrule", "compare E(G(f)) with the energy-measure chain rule");
  add_common(chain, o, true);
  chain->add_option("--poly", o.poly, "polynomial G in x1..xk, e.g. \"x1^2 - 2*x1*x2\"");
  chain->add_option("--depths", o.depth_range, "depth range A..B");
  chain->add_option("--depth", o.depth, "single depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*measure) return cmd_measure(o);
    if (*scan) return cmd_scan(o);
    if (*embed) return cmd_embed(o);
    if (*chain) return cmd_chainrule(o);
  } catch (const pcf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const pcf::ValidationError& e) {
    std::cerr << "validation failed [" << e.invariant() << "]: " << e.what() << "\n";
    return 1;
  } catch (const pcf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
