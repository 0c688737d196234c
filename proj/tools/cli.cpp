#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "rcw/deciders.hpp"
#include "rcw/fraisse.hpp"
#include "rcw/modelzoo.hpp"
#include "rcw/reductions.hpp"
#include "rcw/verify.hpp"

namespace rcw::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw Error("write to '" + path + "' failed");
}

std::string render_elems(const ElemSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw ParseError("range '" + text + "' is not of the form A..B");
  }
}

// vfin: "6" (blocks, 0 = fill the cap); bfm: "12" (atoms);
// vlines: "4,3" or "4,3x2" (line sizes, optional blocks per line).
ZooParams parse_zoo_params(ZooKind kind, const std::string& text) {
  ZooParams p;
  try {
    if (kind == ZooKind::vlines) {
      std::string sizes = text;
      const auto x = text.find('x');
      if (x != std::string::npos) {
        sizes = text.substr(0, x);
        p.blocks_per_line = std::stoi(text.substr(x + 1));
      }
      std::stringstream ss(sizes);
      for (std::string item; std::getline(ss, item, ',');) p.line_sizes.push_back(std::stoi(item));
    } else if (kind == ZooKind::vfin) {
      p.blocks = text.empty() ? 0 : std::stoi(text);
    } else {
      p.atoms = std::stoi(text);
    }
  } catch (const std::logic_error&) {
    throw ParseError("cannot read model parameters '" + text + "'");
  }
  return p;
}

std::string model_label(const ZooModel& m) {
  std::string s = zoo_kind_name(m.kind) + "(";
  if (m.kind == ZooKind::bfm) return s + std::to_string(m.atom_count) + " atoms)";
  s += std::to_string(m.blocks.size()) + " blocks, " + std::to_string(m.atom_count) + " atoms";
  if (!m.support.empty()) s += ", E={" + m.support.render() + "}";
  return s + ")";
}

struct Options {
  unsigned jobs = 1;
  // decide / matrix
  int arity = 0;
  int m = 0;
  int k = 0;
  int bound = 0;
  std::string mode = "complete";
  std::string cert;
  std::string cert_dir;
  std::string m_range;
  bool list = false;
  // verify / fraisse check
  std::string file;
  // reduce
  int n = 0;
  std::string family;
  std::uint64_t oracle_seed = 0;
  std::string trace;
  // fraisse
  int stages = 0;
  std::string out_file;
  std::size_t atom_cap = kFraisseAtomCap;
  std::size_t window = 40;
  // zoo
  std::string model;
  std::string model_file;
  std::string params;
  std::string principle;
  int e_max = kDefaultSupportBudget;
  int cap = kZooAtomCap;
};

void print_examined(std::ostream& out, const Verdict& v) {
  for (const CandidateRecord& r : v.examined)
    out << "  d=" << r.degree << " " << r.group << " order " << r.order << (r.admits ? " admits" : " no") << "\n";
}

int cmd_decide_rc(const Options& o, std::ostream& out) {
  const Verdict v = decide_local_rc(o.arity, o.m, parse_mode(o.mode), o.jobs);
  out << v.summary << "\n";
  if (o.list) print_examined(out, v);
  if (v.witness && !o.cert.empty()) write_file(o.cert, serialize_certificate(*v.witness));
  return kExitOk;
}

int cmd_decide_nrc(const Options& o, std::ostream& out) {
  const Verdict v = decide_local_nrc(o.arity, o.k, o.bound, parse_mode(o.mode), o.jobs);
  out << v.summary << "\n";
  if (o.list) print_examined(out, v);
  if (v.witness && !o.cert.empty()) write_file(o.cert, serialize_certificate(*v.witness));
  return kExitOk;
}

int cmd_matrix(const Options& o, std::ostream& out) {
  const auto [lo, hi] = parse_range(o.m_range);
  const auto verdicts = implication_matrix(o.arity, lo, hi, parse_mode(o.mode), o.jobs);
  if (!o.cert_dir.empty()) std::filesystem::create_directories(o.cert_dir);
  for (const Verdict& v : verdicts) {
    out << v.summary << "\n";
    if (v.witness && !o.cert_dir.empty()) {
      const std::string name = "rc_n" + std::to_string(o.arity) + "_m" + std::to_string(v.bound) + ".json";
      write_file((std::filesystem::path(o.cert_dir) / name).string(), serialize_certificate(*v.witness));
    }
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const VerifyResult r = verify_certificate(read_file(o.file));
  if (r.accepted) {
    out << "accepted " << o.file << "\n";
    return kExitOk;
  }
  out << "rejected " << o.file << ": " << r.reason << ": " << r.detail << "\n";
  return kExitRejected;
}

int cmd_reduce(const Options& o, std::ostream& out) {
  OracleFamily fam{parse_family(read_file(o.family)), seeded_oracle(o.n, o.oracle_seed)};
  const ReductionResult r = reduce(o.n, fam);
  std::map<std::string, std::size_t> by_rule;
  for (const auto& [i, rule] : r.rule) ++by_rule[rule];
  out << "reduce n=" << o.n << " members=" << fam.members.size() << " oracle_seed=" << o.oracle_seed << ": assigned "
      << r.selection.assignments.size() << "/" << fam.members.size()
      << (is_valid_selection(fam.members, r.selection) ? " valid" : " INVALID");
  std::string sep = " (";
  for (const auto& [rule, count] : by_rule) {
    out << sep << rule << " " << count;
    sep = ", ";
  }
  out << (by_rule.empty() ? "" : ")") << ", " << r.calls.size() << " oracle calls\n";
  for (const auto& [i, sel] : r.selection.assignments)
    out << "  member " << i << " " << render_elems(fam.members[i]) << " -> " << render_elems(sel) << " ["
        << r.rule.at(i) << "]\n";
  if (!o.trace.empty()) write_file(o.trace, write_oracle_trace(r.calls));
  return kExitOk;
}

int cmd_fraisse_build(const Options& o, std::ostream& out) {
  const FraisseStage s = build_stages(o.arity, o.stages, o.atom_cap);
  write_file(o.out_file, dump_stage(s));
  out << "fraisse n=" << s.n << " stages=" << s.index << ": sizes";
  for (std::size_t i = 1; i < s.sizes.size(); ++i) out << " " << s.sizes[i];
  out << " -> " << o.out_file << "\n";
  return kExitOk;
}

int cmd_fraisse_check(const Options& o, std::ostream& out) {
  const FraisseStage s = load_stage(read_file(o.file));
  const SelScanReport scan = scan_stage(s, o.window);
  const ExtensionReport ext = check_extension_property(s);
  const bool ok = scan.ok() && ext.misses.empty();
  out << "fraisse check " << o.file << ": n=" << s.n << " stage " << s.index << ", " << s.size() << " atoms; "
      << scan.closures << " closures, " << scan.window_sets << " window sets, " << scan.violations.size()
      << " violations; " << ext.grounds << " grounds, " << ext.types << " types, " << ext.misses.size()
      << " extension misses: " << (ok ? "ok" : "fails") << "\n";
  for (const std::string& v : scan.violations) out << "  violation: " << v << "\n";
  for (const ExtensionMiss& m : ext.misses) out << "  miss: ground " << render_elems(m.ground) << " type " << m.type << "\n";
  return ok ? kExitOk : kExitRejected;
}

int cmd_zoo_eval(const Options& o, std::ostream& out) {
  ZooModel m;
  if (!o.model_file.empty()) {
    m = model_from_json(read_file(o.model_file));
  } else {
    const ZooKind kind = parse_zoo_kind(o.model);
    m = make_model(kind, parse_zoo_params(kind, o.params), o.cap);
  }
  const ZooPrinciple p = parse_zoo_principle(o.principle);
  const ZooVerdict v = evaluate(m, p, o.n, o.e_max);
  out << "zoo " << model_label(m) << " " << zoo_principle_name(p) << "(" << o.n << ") e_max=" << o.e_max << ": ";
  if (v.holds_at_bound) {
    out << "holds_at_bound (E={" << v.support.render() << "}, " << v.supports_tested << " supports tested";
    if (p == ZooPrinciple::ncfin_minus) out << ", counts " << v.count_small << " -> " << v.count_large;
    out << ")\n";
    return kExitOk;
  }
  out << "fails (" << v.supports_tested << " supports tested";
  if (!v.witness.empty()) out << ", witness {" << v.witness.render() << "}";
  out << "; " << v.witness_template << ")\n";
  if (!o.cert.empty()) {
    const auto c = zoo_certificate(m, v);
    if (c) write_file(o.cert, serialize_certificate(*c));
    else out << "  no certificate: the witness does not fit the verifier's domain\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selection structures under group actions: decisions, certificates, reductions, models"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("-j,--jobs", o.jobs, "Worker threads for candidate-group search (0 = all cores)")->capture_default_str();

  auto* decide = app.add_subcommand("decide", "Local decision for one implication");
  decide->require_subcommand(1);
  auto* rc = decide->add_subcommand("rc", "Does nRC_fin imply RC_m on groups of degree m?");
  rc->add_option("--arity", o.arity, "Selection arity n")->required();
  rc->add_option("--m", o.m, "Target size m")->required();
  rc->add_option("--mode", o.mode, "complete | cyclic")->capture_default_str();
  rc->add_option("--cert", o.cert, "Write the failure certificate here");
  rc->add_flag("--list", o.list, "Print every candidate group examined");
  auto* nrc = decide->add_subcommand("nrc", "Does mRC_fin imply kRC_fin up to a domain bound?");
  nrc->add_option("--arity", o.arity, "Source arity m")->required();
  nrc->add_option("--k", o.k, "Target arity k")->required();
  nrc->add_option("--bound", o.bound, "Largest domain size searched")->required();
  nrc->add_option("--mode", o.mode, "complete | cyclic")->capture_default_str();
  nrc->add_option("--cert", o.cert, "Write the failure certificate here");
  nrc->add_flag("--list", o.list, "Print every candidate group examined");

  auto* matrix = app.add_subcommand("matrix", "Decisions for a range of targets");
  matrix->require_subcommand(1);
  auto* mrc = matrix->add_subcommand("rc", "decide rc for every m in a range");
  mrc->add_option("--arity", o.arity, "Selection arity n")->required();
  mrc->add_option("--m-range", o.m_range, "A..B")->required();
  mrc->add_option("--mode", o.mode, "complete | cyclic")->capture_default_str();
  mrc->add_option("--cert-dir", o.cert_dir, "Write failure certificates into this directory");

  auto* verify = app.add_subcommand("verify", "Independently re-check a certificate");
  verify->add_option("cert", o.file, "Certificate file")->required();

  auto* red = app.add_subcommand("reduce", "Run the finite selection reduction against a seeded oracle");
  red->add_option("--n", o.n, "Arity: 2, 3, 4 or 6")->required();
  red->add_option("--family", o.family, "Family JSON file")->required();
  red->add_option("--oracle-seed", o.oracle_seed, "Seed of the adversarial oracle")->capture_default_str();
  red->add_option("--trace", o.trace, "Write the oracle trace here");

  auto* fr = app.add_subcommand("fraisse", "Staged generic selection model");
  fr->require_subcommand(1);
  auto* fb = fr->add_subcommand("build", "Build stages and dump the last one");
  fb->add_option("--arity", o.arity, "Selection arity n")->required();
  fb->add_option("--stages", o.stages, "Number of stages")->required();
  fb->add_option("--out", o.out_file, "Dump file")->required();
  fb->add_option("--atom-cap", o.atom_cap, "Largest number of atoms allowed")->capture_default_str();
  auto* fc = fr->add_subcommand("check", "Scan a dumped stage");
  fc->add_option("file", o.file, "Dump file")->required();
  fc->add_option("--window", o.window, "Atoms covered by the n+1 / n+2 set scan")->capture_default_str();

  auto* zoo = app.add_subcommand("zoo", "Finite permutation models");
  zoo->require_subcommand(1);
  auto* ze = zoo->add_subcommand("eval", "Evaluate a principle on a model");
  auto* model_opt = ze->add_option("--model", o.model, "vfin | vlines | bfm");
  ze->add_option("--params", o.params, "vfin: blocks; bfm: atoms; vlines: sizes[xPER_LINE], e.g. 4,3x2");
  ze->add_option("--model-file", o.model_file, "Model descriptor JSON")->excludes(model_opt);
  ze->add_option("--principle", o.principle, "nrc_fin | c_n | ncfin_minus | rc")->required();
  ze->add_option("--n", o.n, "Principle parameter n")->required();
  ze->add_option("--support-budget", o.e_max, "Largest support |E| searched")->capture_default_str();
  ze->add_option("--cap", o.cap, "Atom cap")->capture_default_str();
  ze->add_option("--cert", o.cert, "Write the failure certificate here");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (ze->parsed() && o.model_file.empty() && o.model.empty()) throw PreconditionError("--model or --model-file is required");
    if (rc->parsed()) return cmd_decide_rc(o, out);
    if (nrc->parsed()) return cmd_decide_nrc(o, out);
    if (mrc->parsed()) return cmd_matrix(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (red->parsed()) return cmd_reduce(o, out);
    if (fb->parsed()) return cmd_fraisse_build(o, out);
    if (fc->parsed()) return cmd_fraisse_check(o, out);
    if (ze->parsed()) return cmd_zoo_eval(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "usage error: no command\n";
  return kExitError;
}

}  // namespace rcw::cli
