#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "msrforge/reconstruct.hpp"
#include "msrforge/repair.hpp"

namespace msrforge {

struct node_metrics {
  long long repairs = 0;
  long long moved = 0;
  long long optimal_moved = 0;
  long long accessed = 0;
  long long optimal_accessed = 0;
};

struct cluster_metrics {
  int nodes = 0;
  int stripes = 0;
  int symbols_per_node = 0;
  long long repairs_run = 0;
  long long symbols_moved = 0;
  long long symbols_accessed = 0;
  long long optimal_moved = 0;
  long long naive_per_stripe = 0;    // download-everything baseline
  long long optimal_per_stripe = 0;  // (k+r-1) * N
  std::vector<node_metrics> per_node;

  static std::string ratio(long long actual, long long optimal) {
    if (optimal == 0) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3)
       << double(actual) / double(optimal);
    return os.str();
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "cluster: nodes=" << nodes << " stripes=" << stripes
       << " symbols_per_node=" << symbols_per_node << "\n";
    os << "repairs_run=" << repairs_run << " symbols_moved=" << symbols_moved
       << " symbols_accessed=" << symbols_accessed << "\n";
    os << "bandwidth_ratio=" << ratio(symbols_moved, optimal_moved)
       << " access_ratio=" << ratio(symbols_accessed, optimal_moved) << "\n";
    os << "optimal_per_stripe=" << optimal_per_stripe
       << " naive_per_stripe=" << naive_per_stripe << "\n";
    for (int id = 0; id < int(per_node.size()); ++id) {
      const auto& nm = per_node[id];
      os << "node " << id << ": repairs=" << nm.repairs << " moved=" << nm.moved
         << " bandwidth_ratio=" << ratio(nm.moved, nm.optimal_moved)
         << " access_ratio=" << ratio(nm.accessed, nm.optimal_accessed) << "\n";
    }
    return os.str();
  }

  std::string to_kv() const {
    std::ostringstream os;
    os << "nodes=" << nodes << "\n";
    os << "stripes=" << stripes << "\n";
    os << "symbols_per_node=" << symbols_per_node << "\n";
    os << "repairs_run=" << repairs_run << "\n";
    os << "symbols_moved=" << symbols_moved << "\n";
    os << "symbols_accessed=" << symbols_accessed << "\n";
    os << "optimal_moved=" << optimal_moved << "\n";
    os << "optimal_per_stripe=" << optimal_per_stripe << "\n";
    os << "naive_per_stripe=" << naive_per_stripe << "\n";
    for (int id = 0; id < int(per_node.size()); ++id) {
      const auto& nm = per_node[id];
      os << "node" << id << ".repairs=" << nm.repairs << "\n";
      os << "node" << id << ".moved=" << nm.moved << "\n";
      os << "node" << id << ".optimal_moved=" << nm.optimal_moved << "\n";
      os << "node" << id << ".accessed=" << nm.accessed << "\n";
      os << "node" << id << ".optimal_accessed=" << nm.optimal_accessed << "\n";
    }
    return os.str();
  }
};

/// In-memory cluster: stripes of seeded random source data spread across the
/// k+r simulated nodes, single failure repair, multi-failure degraded reads.
class cluster {
 public:
  cluster(msr_code code, int stripes, std::uint64_t seed)
      : code_(std::move(code)), stripes_(stripes) {
    if (stripes < 0) fail(errc::dimension_mismatch, "negative stripe count");
    alive_.assign(code_.nodes(), 1);
    store_.assign(code_.nodes(), std::vector<gf_vec>(stripes));
    const gf_vec src = random_source(code_, stripes, seed);
    const int stripe_symbols = code_.k() * code_.node_capacity();
    for (int st = 0; st < stripes; ++st) {
      const gf_vec flat = vec_slice(src, st * stripe_symbols, stripe_symbols);
      const msr_codeword cw = encode(code_, split_stripe(flat));
      for (int id = 0; id < code_.nodes(); ++id) store_[id][st] = node_content(cw, id);
    }
  }

  static gf_vec random_source(const msr_code& code, int stripes, std::uint64_t seed) {
    rng gen(seed);
    gf_vec out(std::size_t(stripes) * code.k() * code.node_capacity());
    for (auto& x : out) x = elem(gen.below(code.fld().q()));
    return out;
  }

  const msr_code& code() const { return code_; }
  int stripes() const { return stripes_; }
  int node_count() const { return code_.nodes(); }
  bool alive(int node) const {
    check_node(node);
    return alive_[node] != 0;
  }
  int failed_count() const {
    int c = 0;
    for (char a : alive_)
      if (!a) ++c;
    return c;
  }

  /// Stored blocks of one node across all stripes (snapshot for tests).
  const std::vector<gf_vec>& node_store(int node) const {
    check_node(node);
    return store_[node];
  }

  void fail_node(int node) {
    check_node(node);
    if (!alive_[node]) fail(errc::already_failed, "node " + std::to_string(node));
    alive_[node] = 0;
    for (auto& blk : store_[node]) blk.clear();
  }

  /// Repair the single failed node; every other node must be alive.
  repair_trace repair_failed(int node) {
    check_node(node);
    if (alive_[node]) fail(errc::not_failed, "node " + std::to_string(node) + " is alive");
    if (failed_count() > 1)
      fail(errc::too_many_failures, "repair handles one failure at a time");
    repair_trace agg;
    agg.failed_node = node;
    agg.per_helper_nominal = code_.n();
    agg.optimal = true;
    agg.access_optimal = true;
    for (int st = 0; st < stripes_; ++st) {
      const msr_codeword cw = stripe_view(st, node);
      auto [restored, trace] = repair_node(code_, node, cw);
      gf_vec content;
      for (const auto& piece : restored) vec_append(content, piece);
      store_[node][st] = std::move(content);
      if (agg.helpers.empty()) {
        agg.helpers = trace.helpers;
        agg.downloaded.assign(trace.helpers.size(), 0);
        agg.accessed.assign(trace.helpers.size(), 0);
      }
      for (std::size_t h = 0; h < trace.helpers.size(); ++h) {
        agg.downloaded[h] += trace.downloaded[h];
        agg.accessed[h] += trace.accessed[h];
      }
      agg.total_downloaded += trace.total_downloaded;
      agg.optimal = agg.optimal && trace.optimal;
      agg.access_optimal = agg.access_optimal && trace.access_optimal;
      agg.optimal_bandwidth += trace.optimal_bandwidth;

      auto& nm = node_stats(node);
      nm.moved += trace.total_downloaded;
      nm.optimal_moved += trace.optimal_bandwidth;
      long long acc = 0, acc_opt = 0;
      for (std::size_t h = 0; h < trace.helpers.size(); ++h) {
        acc += trace.accessed[h];
        acc_opt += code_.n();
      }
      nm.accessed += acc;
      nm.optimal_accessed += acc_opt;
      symbols_moved_ += trace.total_downloaded;
      symbols_accessed_ += acc;
      optimal_moved_ += trace.optimal_bandwidth;
    }
    alive_[node] = 1;
    node_stats(node).repairs += 1;
    repairs_run_ += 1;
    return agg;
  }

  /// Source symbols of one stripe, reconstructed through any k alive nodes.
  gf_vec degrade_read(int stripe) const {
    if (stripe < 0 || stripe >= stripes_) fail(errc::index_out_of_range, "stripe");
    if (failed_count() > code_.r())
      fail(errc::too_many_failures, "more than r nodes are down");
    bool all_systematic = true;
    for (int i = 0; i < code_.k(); ++i)
      if (!alive_[i]) all_systematic = false;
    gf_vec out;
    if (all_systematic) {
      for (int i = 0; i < code_.k(); ++i) vec_append(out, store_[i][stripe]);
      return out;
    }
    std::vector<std::optional<gf_vec>> nodes(code_.nodes());
    int taken = 0;
    for (int id = 0; id < code_.nodes() && taken < code_.k(); ++id) {
      if (!alive_[id]) continue;
      nodes[id] = store_[id][stripe];
      ++taken;
    }
    const auto data = reconstruct(code_, nodes);
    for (int i = 0; i < code_.k(); ++i)
      for (int l = 0; l < code_.r(); ++l) vec_append(out, data[i][l]);
    return out;
  }

  cluster_metrics metrics_report() const {
    cluster_metrics mtr;
    mtr.nodes = code_.nodes();
    mtr.stripes = stripes_;
    mtr.symbols_per_node = stripes_ * code_.node_capacity();
    mtr.repairs_run = repairs_run_;
    mtr.symbols_moved = symbols_moved_;
    mtr.symbols_accessed = symbols_accessed_;
    mtr.optimal_moved = optimal_moved_;
    mtr.optimal_per_stripe = static_cast<long long>(code_.nodes() - 1) * code_.n();
    mtr.naive_per_stripe = static_cast<long long>(code_.k()) * code_.node_capacity();
    mtr.per_node = per_node_;
    mtr.per_node.resize(code_.nodes());
    return mtr;
  }

 private:
  void check_node(int node) const {
    if (node < 0 || node >= code_.nodes()) fail(errc::index_out_of_range, "node id");
  }

  node_metrics& node_stats(int node) {
    if (per_node_.empty()) per_node_.resize(code_.nodes());
    return per_node_[node];
  }

  std::vector<std::vector<gf_vec>> split_stripe(const gf_vec& flat) const {
    std::vector<std::vector<gf_vec>> data(code_.k(), std::vector<gf_vec>(code_.r()));
    for (int i = 0; i < code_.k(); ++i)
      for (int l = 0; l < code_.r(); ++l)
        data[i][l] = vec_slice(flat, i * code_.node_capacity() + l * code_.n(), code_.n());
    return data;
  }

  // view of one stripe with the failed node's slot zeroed out
  msr_codeword stripe_view(int stripe, int failed) const {
    std::vector<gf_vec> contents(code_.nodes());
    for (int id = 0; id < code_.nodes(); ++id)
      contents[id] = id == failed ? gf_vec(std::size_t(code_.node_capacity()), 0)
                                  : store_[id][stripe];
    return codeword_from_nodes(code_, contents);
  }

  msr_code code_;
  int stripes_ = 0;
  std::vector<char> alive_;
  std::vector<std::vector<gf_vec>> store_;
  long long repairs_run_ = 0;
  long long symbols_moved_ = 0;
  long long symbols_accessed_ = 0;
  long long optimal_moved_ = 0;
  std::vector<node_metrics> per_node_;
};

}  // namespace msrforge
