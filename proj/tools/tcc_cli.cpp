// tccwb: batch front end for the workbench.
//
//   tccwb fci        --model hubbard:2,1,4
//   tccwb cas-fci    --fcidump h4.fcidump --k 6
//   tccwb select-cas --model pairing:4,0.5,1 --jump
//   tccwb tcc        --model hubbard:4,1,2 --k 6 --trunc sd
//   tccwb verify     --model pairing:4,0.5,1 --k 6 --assumptions --error-scaling
//
// Exit codes: 1 input error, 2 solver failure, 3 limit exceeded.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tcc/workbench.hpp"

namespace fs = std::filesystem;
using namespace tcc;

namespace {

struct Options {
  std::string command;
  std::string fcidump;
  std::string model;
  std::optional<int> k;
  std::optional<double> s_threshold;
  std::optional<double> mi_threshold;
  bool jump = false;
  std::string trunc = "full";
  std::uint64_t seed = 1;
  std::string out = ".";
  double damping = 1.0;
  int diis = 0;
  double tol = 1e-10;
  int max_iter = 500;
  bool newton = false;
  int states = 1;
  bool assumptions = false;
  bool error_scaling = false;
  bool decomposition = false;
  bool linearized = false;
  std::string family = "rank:1,rank:2,rank:3,full";
  std::string cas_source = "cas-fci";
  double noise = 1e-3;
  double delta = 0.1;
  int samples = 64;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SizeLimit:
    case ErrorKind::DimensionLimit:
      return 3;
    case ErrorKind::SolverFailure:
    case ErrorKind::SingularJacobian:
    case ErrorKind::GapViolation:
    case ErrorKind::NonPositiveWeight:
    case ErrorKind::ZeroReferenceOverlap:
    case ErrorKind::InsufficientPoints:
      return 2;
    default:
      return 1;
  }
}

/// Settings that determine the results. The output directory is not one of them.
Json config_json(const Options& o) {
  Json c;
  c["command"] = o.command;
  if (!o.fcidump.empty()) c["fcidump"] = o.fcidump;
  if (!o.model.empty()) c["model"] = o.model;
  if (o.k) c["k"] = *o.k;
  if (o.s_threshold) c["s_threshold"] = *o.s_threshold;
  if (o.mi_threshold) c["mi_threshold"] = *o.mi_threshold;
  c["jump"] = o.jump;
  c["seed"] = o.seed;
  if (o.command == "fci" || o.command == "cas-fci") c["states"] = o.states;
  if (o.command == "tcc" || o.command == "verify") {
    c["trunc"] = o.trunc;
    c["damping"] = o.damping;
    c["diis"] = o.diis;
    c["tol"] = o.tol;
    c["max_iter"] = o.max_iter;
    c["newton"] = o.newton;
  }
  if (o.command == "verify") {
    c["assumptions"] = o.assumptions;
    c["error_scaling"] = o.error_scaling;
    c["decomposition"] = o.decomposition;
    c["linearized"] = o.linearized;
    c["family"] = o.family;
    c["cas_source"] = o.cas_source;
    c["noise"] = o.noise;
    c["delta"] = o.delta;
    c["samples"] = o.samples;
  }
  return c;
}

class Run {
 public:
  explicit Run(const Options& o) : o_(o), config_(config_json(o)), hash_(hex64(fnv1a(dump_json(config_)))) {
    fs::create_directories(o.out);
  }

  Json header() const {
    Json j;
    j["tool"] = "tccwb";
    j["version"] = kToolVersion;
    j["config_hash"] = hash_;
    j["config"] = config_;
    return j;
  }

  std::string tsv_header() const {
    return std::string("# tccwb ") + kToolVersion + " config_hash=" + hash_ + "\n";
  }

  void write(const std::string& name, const std::string& text) const {
    write_text_file((fs::path(o_.out) / name).string(), text);
  }

 private:
  const Options& o_;
  Json config_;
  std::string hash_;
};

IntegralSet load_integrals(const Options& o) {
  if (o.fcidump.empty() == o.model.empty()) fail(ErrorKind::InvalidArgument, "give exactly one of --fcidump and --model");
  if (!o.fcidump.empty()) return parse_fcidump_file(o.fcidump);
  return generate_model_hamiltonian(parse_model_spec(o.model));
}

enum class SplitSource { None, Explicit, Threshold, Jump };

SplitSource split_source(const Options& o) {
  const bool thr = o.s_threshold || o.mi_threshold;
  const int n = int(o.k.has_value()) + int(thr) + int(o.jump);
  if (n > 1) fail(ErrorKind::InvalidArgument, "give only one of --k, the entropy thresholds and --jump");
  if (o.k) return SplitSource::Explicit;
  if (thr) return SplitSource::Threshold;
  if (o.jump) return SplitSource::Jump;
  return SplitSource::None;
}

struct Selected {
  CasSelection selection;
  OrbitalEntropyProfile profile;
};

Selected run_selection(const Options& o, const IntegralSet& ints) {
  const OrbitalBasis basis = ints.basis();
  const DeterminantSpace space(basis);
  const auto fci = fci_solve(space, hamiltonian_matrix(space, ints));
  Selected s;
  s.profile = mutual_information(fci.states[0], space, "FCI ground state");
  if (o.jump)
    s.selection = select_cas(s.profile, basis.n_electrons, 0.0, 0.0, SelectionMode::Jump);
  else
    s.selection = select_cas(s.profile, basis.n_electrons, o.s_threshold.value_or(0.0), o.mi_threshold.value_or(0.0),
                             SelectionMode::Threshold);
  return s;
}

/// Integrals relabelled so that the CAS is contiguous, plus the split.
struct Prepared {
  IntegralSet ints;
  BasisSplit split;
  Json split_json;
};

Prepared prepare_split(const Options& o, const IntegralSet& ints) {
  const SplitSource src = split_source(o);
  if (src == SplitSource::None) fail(ErrorKind::InvalidArgument, "this command needs --k, an entropy threshold or --jump");
  if (src == SplitSource::Explicit) {
    Prepared p{ints, BasisSplit::make(ints.basis(), *o.k), Json::object()};
    p.split_json["k"] = *o.k;
    p.split_json["source"] = "explicit";
    return p;
  }
  const Selected sel = run_selection(o, ints);
  Prepared p{ints.permuted(sel.selection.order), {}, to_json(sel.selection)};
  p.split = BasisSplit::make(p.ints.basis(), sel.selection.k);
  p.split_json["source"] = src == SplitSource::Jump ? "jump" : "threshold";
  return p;
}

TccConfig solver_config(const Options& o) {
  TccConfig c;
  c.tolerance = o.tol;
  c.damping = o.damping;
  c.diis = o.diis;
  c.max_iterations = o.max_iter;
  c.newton = o.newton;
  c.truncation = TruncationScheme::parse(o.trunc);
  c.validate();
  return c;
}

std::vector<TruncationScheme> parse_family(const std::string& text) {
  std::vector<TruncationScheme> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(TruncationScheme::parse(item));
  return out;
}

void print_energy(const char* label, double e) { std::printf("%s %s\n", label, format_real(e).c_str()); }

int cmd_fci(const Options& o) {
  const Run run(o);
  const IntegralSet ints = load_integrals(o);
  const DeterminantSpace space(ints.basis());
  const auto res = fci_solve(space, hamiltonian_matrix(space, ints), o.states);
  Json j = run.header();
  j["spectrum"] = to_json(res.summary);
  j["ground_state"] = to_json(res.states[0], space);
  run.write("fci.json", dump_json(j));
  print_energy("E_FCI", res.summary.eigenvalues[0]);
  return 0;
}

int cmd_cas_fci(const Options& o) {
  const Run run(o);
  const Prepared p = prepare_split(o, load_integrals(o));
  const DeterminantSpace space(p.ints.basis());
  const auto res = cas_fci_solve(p.ints, space, p.split, o.states);
  Json j = run.header();
  j["split"] = p.split_json;
  j["spectrum"] = to_json(res.summary);
  j["ground_state"] = to_json(res.states[0], space);
  run.write("cas_fci.json", dump_json(j));
  print_energy("E_CAS", res.summary.eigenvalues[0]);
  return 0;
}

int cmd_select_cas(const Options& o) {
  const Run run(o);
  const SplitSource src = split_source(o);
  if (src != SplitSource::Threshold && src != SplitSource::Jump)
    fail(ErrorKind::InvalidArgument, "select-cas needs --s-threshold/--mi-threshold or --jump");
  const Selected sel = run_selection(o, load_integrals(o));
  Json j = run.header();
  j["selection"] = to_json(sel.selection);
  j["profile"] = to_json(sel.profile);
  run.write("selection.json", dump_json(j));
  run.write("profile.tsv", run.tsv_header() + profile_tsv(sel.profile));
  for (const auto& w : sel.selection.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("k %d\n", sel.selection.k);
  return 0;
}

Eigen::VectorXd cas_amplitudes(const TccProblem& p, const IntegralSet& ints) {
  const auto cas = cas_fci_solve(ints, p.space(), p.split());
  return ci_to_cluster(cas.states[0], p.space(), AmplitudeSpace::Cas).to_dense(p.cas_set());
}

int cmd_tcc(const Options& o) {
  const Run run(o);
  const TccConfig config = solver_config(o);
  const Prepared prep = prepare_split(o, load_integrals(o));
  const TccProblem p(prep.ints, prep.ints.basis(), prep.split);
  const Eigen::VectorXd t_cas = cas_amplitudes(p, prep.ints);
  const TccResult res = solve_tcc(p, p.truncated_set(config.truncation), t_cas, config);
  Json j = run.header();
  j["split"] = prep.split_json;
  j["gaps"] = to_json(gap_report(p.fock(), p.split(), p.basis()));
  j["fock_warnings"] = p.fock().warnings;
  j["cas_source"] = "CAS_FCI";
  j["result"] = to_json(res);
  run.write("tcc.json", dump_json(j));
  run.write("history.tsv", run.tsv_header() + history_tsv(res));
  print_energy("E_TCC", res.energy);
  if (!res.converged) {
    std::fprintf(stderr, "error: TCC iteration %s\n", res.status.c_str());
    return 2;
  }
  return 0;
}

int cmd_verify(const Options& o) {
  if (!o.assumptions && !o.error_scaling && !o.decomposition)
    fail(ErrorKind::InvalidArgument, "verify needs --assumptions, --error-scaling or --decomposition");
  const Run run(o);
  const TccConfig config = solver_config(o);
  const Prepared prep = prepare_split(o, load_integrals(o));
  const TccProblem p(prep.ints, prep.ints.basis(), prep.split);

  Eigen::VectorXd t_cas;
  if (o.cas_source == "cas-fci")
    t_cas = cas_amplitudes(p, prep.ints);
  else if (o.cas_source == "zero")
    t_cas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.cas_set().size()));
  else if (o.cas_source == "perturbed")
    t_cas = perturbed_cas(cas_amplitudes(p, prep.ints), o.noise, o.seed);
  else
    fail(ErrorKind::InvalidArgument, "cas source must be cas-fci, zero or perturbed");

  TccConfig root = diagnostic_solver_config();
  root.tolerance = std::min(root.tolerance, o.tol);

  if (o.assumptions) {
    const Eigen::VectorXd t_star = detail::converged_root(p, p.ext_set(), t_cas, root, "t_*");
    Json j = run.header();
    j["split"] = prep.split_json;
    j["report"] = to_json(assumption_b_report(p, t_cas, t_star, o.delta, o.samples, o.seed));
    run.write("assumptions.json", dump_json(j));
  }
  if (o.decomposition) {
    const CasSource src = o.cas_source == "perturbed" ? CasSource::Perturbed : CasSource::CasFci;
    Json j = run.header();
    j["split"] = prep.split_json;
    j["report"] = to_json(error_decomposition(p, prep.ints, config.truncation, src, o.noise, o.seed, root));
    run.write("decomposition.json", dump_json(j));
  }
  if (o.error_scaling) {
    const auto family = parse_family(o.family);
    const ScalingStudy s =
        o.linearized ? linearized_scaling_study(p, family, t_cas) : quadratic_scaling_study(p, family, t_cas, root);
    Json j = run.header();
    j["split"] = prep.split_json;
    j["study"] = to_json(s);
    run.write("scaling.json", dump_json(j));
    run.write("scaling.tsv", run.tsv_header() + scaling_tsv(s));
    print_energy("slope", s.slope);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tailored coupled-cluster workbench"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  // Model specs contain commas, so config values are never split into arrays.
  app.get_config_formatter_base()->arrayDelimiter(';');
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--fcidump", o.fcidump, "FCIDUMP file");
  app.add_option("--model", o.model, "hubbard:L,t,U[,N] | hubbard-site:L,t,U[,N] | pairing:L,g,spacing[,N]");
  app.add_option("--k", o.k, "CAS size in spin-orbitals");
  app.add_option("--s-threshold", o.s_threshold, "single-orbital entropy threshold");
  app.add_option("--mi-threshold", o.mi_threshold, "mutual information threshold");
  app.add_flag("--jump", o.jump, "cut the sorted mutual information at its largest ratio");
  app.add_option("--trunc", o.trunc, "sd | rank:N | foi:N | full")->capture_default_str();
  app.add_option("--seed", o.seed)->capture_default_str();
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--damping", o.damping)->capture_default_str();
  app.add_option("--diis", o.diis, "DIIS history length, 0 disables")->capture_default_str();
  app.add_option("--tol", o.tol)->capture_default_str();
  app.add_option("--max-iter", o.max_iter)->capture_default_str();
  app.add_flag("--newton", o.newton, "exact-Jacobian steps");
  app.add_option("--states", o.states, "number of eigenpairs")->capture_default_str();
  app.add_flag("--assumptions", o.assumptions, "gap, Lipschitz and monotonicity report");
  app.add_flag("--error-scaling", o.error_scaling, "energy error against amplitude error over a truncation family");
  app.add_flag("--decomposition", o.decomposition, "split of the energy error");
  app.add_flag("--linearized", o.linearized, "scaling study of the linearized equations");
  app.add_option("--family", o.family, "comma-separated truncations")->capture_default_str();
  app.add_option("--cas-source", o.cas_source, "cas-fci | zero | perturbed")->capture_default_str();
  app.add_option("--noise", o.noise, "perturbation size for --cas-source perturbed")->capture_default_str();
  app.add_option("--delta", o.delta, "ball radius for sampling")->capture_default_str();
  app.add_option("--samples", o.samples, "random sample pairs")->capture_default_str();

  for (const char* name : {"fci", "cas-fci", "select-cas", "tcc", "verify"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "fci") return cmd_fci(o);
    if (o.command == "cas-fci") return cmd_cas_fci(o);
    if (o.command == "select-cas") return cmd_select_cas(o);
    if (o.command == "tcc") return cmd_tcc(o);
    return cmd_verify(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
