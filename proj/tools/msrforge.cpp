// Command-line front end: base-code generation, transformation, verification,
// file codec, and the failure/repair simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msrforge/msrforge.hpp"

namespace {

using namespace msrforge;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot create " + path);
  out << text;
  if (!out) fail(errc::io_error, "short write to " + path);
}

elem parse_a(const field& f, const std::string& text) {
  if (text == "-1") {
    if (f.kind() == field_kind::binary_ext)
      fail(errc::invalid_a, "-1 equals 1 in a binary extension field");
    return f.minus_one();
  }
  long v = 0;
  try {
    std::size_t used = 0;
    v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (...) {
    fail(errc::parse_error, "cannot parse a-value '" + text + "'");
  }
  if (v < 0 || v >= long(f.q()))
    fail(errc::value_out_of_field, "a=" + text + " outside the field");
  return elem(v);
}

elem default_a(const field& f) {
  // q-1 acts as -1 in odd characteristic; in GF(2^m) use the element x
  return f.kind() == field_kind::prime ? f.minus_one() : elem(2);
}

std::string detect_prefix(const std::string& dir, const std::string& given) {
  if (!given.empty()) return given;
  std::vector<std::string> prefixes;
  if (!std::filesystem::is_directory(dir)) fail(errc::io_error, dir + " is not a directory");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const auto pos = name.rfind(".node");
    if (pos == std::string::npos || name.size() < 5 || name.substr(name.size() - 4) != ".bin")
      continue;
    const std::string prefix = name.substr(0, pos);
    bool known = false;
    for (const auto& p : prefixes) known = known || p == prefix;
    if (!known) prefixes.push_back(prefix);
  }
  if (prefixes.size() != 1)
    fail(errc::io_error, "cannot infer chunk prefix in " + dir + "; pass --prefix");
  return prefixes.front();
}

void print_failures(const verify_report& rep) {
  for (const auto& f : rep.failures) {
    std::cout << "fail " << f.condition << " witness=[";
    for (std::size_t i = 0; i < f.witness.size(); ++i) {
      if (i) std::cout << ',';
      std::cout << f.witness[i];
    }
    std::cout << "]\n";
  }
}

int run_verify(const std::string& bundle_path, const std::string& level) {
  const auto parsed = descriptor_parse(read_text(bundle_path));
  const base_code& base = parsed.base;
  bool all_ok = true;

  const auto mds = verify_mds(base);
  std::cout << "mds: " << (mds.ok() ? "ok" : "FAIL") << "\n";
  print_failures(mds);
  all_ok = all_ok && mds.ok();

  if (base.has_repair()) {
    const auto rep = verify_repair(base);
    std::cout << "repair: " << (rep.ok() ? "ok" : "FAIL") << "\n";
    print_failures(rep);
    all_ok = all_ok && rep.ok();
    const auto acc = verify_access(base);
    for (int i = 0; i < base.k(); ++i)
      std::cout << "access node " << i << ": "
                << (acc.access_node_optimal[i] ? "optimal" : "not-optimal") << "\n";
  } else {
    std::cout << "repair: absent\n";
  }

  if (level == "full") {
    if (!parsed.is_bundle())
      fail(errc::parse_error, "--level full needs a bundle with perm/theta directives");
    const msr_code m = transform(base, *parsed.perms, *parsed.theta);
    const auto full = check_full(m);
    std::cout << "equivalence: " << (full.equivalence_ok.value_or(true) ? "ok" : "FAIL")
              << "\n";
    std::cout << "lifted-repair: "
              << (full.repair_ok ? (*full.repair_ok ? "ok" : "FAIL") : "absent") << "\n";
    std::cout << "lifted-mds: " << (full.mds_ok ? "ok" : "FAIL") << "\n";
    print_failures(full);
    all_ok = all_ok && full.ok();
  }
  std::cout << "verify: " << (all_ok ? "PASS" : "FAIL") << "\n";
  return all_ok ? 0 : 1;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    ids.push_back(std::stoi(item));
  }
  return ids;
}

int run_simulate(const std::string& bundle_path, int stripes, const std::string& script_path,
                 std::uint64_t seed) {
  const msr_code code = bundle_load(read_text(bundle_path));
  cluster cl(code, stripes, seed);
  const gf_vec source = cluster::random_source(code, stripes, seed);
  const int stripe_symbols = code.k() * code.node_capacity();

  std::istringstream script(read_text(script_path));
  std::string raw;
  int line_no = 0;
  while (std::getline(script, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string op;
    if (!(ls >> op)) continue;
    long arg = 0;
    if (!(ls >> arg))
      fail(errc::parse_error, "script line " + std::to_string(line_no) + ": missing operand");
    if (op == "fail") {
      cl.fail_node(int(arg));
      std::cout << "op fail " << arg << "\n";
    } else if (op == "repair") {
      const auto trace = cl.repair_failed(int(arg));
      std::cout << "op repair " << arg << " -> " << trace.to_line() << "\n";
    } else if (op == "read") {
      const gf_vec got = cl.degrade_read(int(arg));
      const gf_vec want = vec_slice(source, int(arg) * stripe_symbols, stripe_symbols);
      if (got != want)
        fail(errc::contract_breach, "degraded read of stripe " + std::to_string(arg) +
                                        " does not match the source");
      std::cout << "op read " << arg << " ok\n";
    } else {
      fail(errc::parse_error,
           "script line " + std::to_string(line_no) + ": unknown op '" + op + "'");
    }
  }
  const auto metrics = cl.metrics_report();
  std::cout << metrics.to_text();
  std::cout << "---\n";
  std::cout << metrics.to_kv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"storage-code transformation workbench"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-base", "generate a built-in base code");
  int gen_r = 2;
  unsigned gen_q = 5;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--r", gen_r, "parity node count")->required();
  gen->add_option("--q", gen_q, "field order")->required();
  gen->add_option("--seed", gen_seed, "search seed");
  gen->add_option("-o,--out", gen_out, "output descriptor path")->required();

  auto* tr = app.add_subcommand("transform", "turn a base descriptor into a code bundle");
  std::string tr_base, tr_perm = "cyclic", tr_a, tr_out;
  tr->add_option("--base", tr_base, "base descriptor path")->required();
  tr->add_option("--perm", tr_perm, "permutation family (cyclic)");
  tr->add_option("--a", tr_a, "pairing coefficient (-1 for q-1)");
  tr->add_option("-o,--out", tr_out, "output bundle path")->required();

  auto* ver = app.add_subcommand("verify", "verify a descriptor or bundle");
  std::string ver_bundle, ver_level = "full";
  ver->add_option("--bundle", ver_bundle, "bundle path")->required();
  ver->add_option("--level", ver_level, "base|full")
      ->check(CLI::IsMember({"base", "full"}));

  auto* bp = app.add_subcommand("blueprint", "print the symbolic parity layout");
  int bp_r = 3;
  std::string bp_a = "a";
  bp->add_option("--r", bp_r, "parity node count")->required();
  bp->add_option("--a", bp_a, "pairing coefficient to display");

  auto* enc = app.add_subcommand("encode", "encode a file into per-node chunks");
  std::string enc_bundle, enc_in, enc_out, enc_prefix;
  enc->add_option("--bundle", enc_bundle, "bundle path")->required();
  enc->add_option("--in", enc_in, "input file")->required();
  enc->add_option("--out", enc_out, "output directory")->required();
  enc->add_option("--prefix", enc_prefix, "chunk name prefix (default: input name)");

  auto* rep = app.add_subcommand("repair", "regenerate one node's chunk");
  std::string rep_bundle, rep_dir, rep_prefix;
  int rep_node = 0;
  rep->add_option("--bundle", rep_bundle, "bundle path")->required();
  rep->add_option("--dir", rep_dir, "chunk directory")->required();
  rep->add_option("--node", rep_node, "node id to regenerate")->required();
  rep->add_option("--prefix", rep_prefix, "chunk name prefix");

  auto* rec = app.add_subcommand("reconstruct", "rebuild the original file from chunks");
  std::string rec_bundle, rec_dir, rec_nodes, rec_out, rec_prefix;
  rec->add_option("--bundle", rec_bundle, "bundle path")->required();
  rec->add_option("--dir", rec_dir, "chunk directory")->required();
  rec->add_option("--nodes", rec_nodes, "comma-separated node ids")->required();
  rec->add_option("--out", rec_out, "output file")->required();
  rec->add_option("--prefix", rec_prefix, "chunk name prefix");

  auto* sim = app.add_subcommand("simulate", "run a failure/repair script");
  std::string sim_bundle, sim_script;
  int sim_stripes = 0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--bundle", sim_bundle, "bundle path")->required();
  sim->add_option("--stripes", sim_stripes, "stripe count")->required();
  sim->add_option("--script", sim_script, "operation script path")->required();
  sim->add_option("--seed", sim_seed, "data seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const base_code code = make_eigen_base(gen_r, gen_q, gen_seed);
      write_text(gen_out, descriptor_save(code));
      std::cout << "wrote (" << code.k() + code.r() << "," << code.k()
                << ") base code over GF(" << gen_q << ") to " << gen_out << "\n";
    } else if (*tr) {
      if (tr_perm != "cyclic")
        fail(errc::parse_error, "only --perm cyclic is available here");
      const base_code base = descriptor_load(read_text(tr_base));
      const field& f = base.fld();
      const elem a = tr_a.empty() ? default_a(f) : parse_a(f, tr_a);
      const msr_code m = transform(base, perm_family::cyclic(base.r()),
                                   theta_table::make_default(f, a, base.r()));
      write_text(tr_out, bundle_save(m));
      std::cout << "wrote bundle with node capacity " << m.node_capacity() << " to "
                << tr_out << "\n";
    } else if (*ver) {
      return run_verify(ver_bundle, ver_level);
    } else if (*bp) {
      const auto lines = format_blueprint(perm_family::cyclic(bp_r),
                                          theta_orientation::make_default(bp_r), bp_a);
      for (const auto& line : lines) std::cout << line << "\n";
    } else if (*enc) {
      const msr_code m = bundle_load(read_text(enc_bundle));
      const std::string prefix = enc_prefix.empty()
                                     ? std::filesystem::path(enc_in).filename().string()
                                     : enc_prefix;
      encode_file(m, enc_in, enc_out, prefix);
      std::cout << "wrote " << m.nodes() << " chunks with prefix " << prefix << " to "
                << enc_out << "\n";
    } else if (*rep) {
      const msr_code m = bundle_load(read_text(rep_bundle));
      const std::string prefix = detect_prefix(rep_dir, rep_prefix);
      const repair_trace trace = repair_chunk(m, rep_dir, prefix, rep_node);
      std::cout << trace.to_line() << "\n";
    } else if (*rec) {
      const msr_code m = bundle_load(read_text(rec_bundle));
      const std::string prefix = detect_prefix(rec_dir, rec_prefix);
      reconstruct_file(m, rec_dir, prefix, parse_id_list(rec_nodes), rec_out);
      std::cout << "wrote " << rec_out << "\n";
    } else if (*sim) {
      return run_simulate(sim_bundle, sim_stripes, sim_script, sim_seed);
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
