#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "msrforge/repair.hpp"
#include "msrforge/reconstruct.hpp"

namespace msrforge {

/// 24-byte little-endian chunk header. The trailing 8 bytes carry the
/// original file length so a set of chunks is self-describing.
struct chunk_header {
  static constexpr std::array<char, 4> magic = {'M', 'S', 'R', 'F'};
  static constexpr std::uint8_t current_version = 1;
  static constexpr std::size_t size_bytes = 24;

  std::uint8_t version = current_version;
  std::uint16_t q = 0;
  std::uint8_t k = 0;
  std::uint8_t r = 0;
  std::uint16_t n = 0;
  std::uint32_t stripes = 0;
  std::uint8_t node_id = 0;
  std::uint64_t file_size = 0;

  std::array<std::uint8_t, size_bytes> pack() const {
    std::array<std::uint8_t, size_bytes> out{};
    for (int i = 0; i < 4; ++i) out[i] = std::uint8_t(magic[i]);
    out[4] = version;
    out[5] = std::uint8_t(q & 0xff);
    out[6] = std::uint8_t(q >> 8);
    out[7] = k;
    out[8] = r;
    out[9] = std::uint8_t(n & 0xff);
    out[10] = std::uint8_t(n >> 8);
    for (int i = 0; i < 4; ++i) out[11 + i] = std::uint8_t((stripes >> (8 * i)) & 0xff);
    out[15] = node_id;
    for (int i = 0; i < 8; ++i) out[16 + i] = std::uint8_t((file_size >> (8 * i)) & 0xff);
    return out;
  }

  static chunk_header unpack(const std::array<std::uint8_t, size_bytes>& raw) {
    for (int i = 0; i < 4; ++i)
      if (char(raw[i]) != magic[i]) fail(errc::parse_error, "bad chunk magic");
    chunk_header h;
    h.version = raw[4];
    if (h.version != current_version) fail(errc::parse_error, "unsupported chunk version");
    h.q = std::uint16_t(raw[5] | (unsigned(raw[6]) << 8));
    h.k = raw[7];
    h.r = raw[8];
    h.n = std::uint16_t(raw[9] | (unsigned(raw[10]) << 8));
    h.stripes = 0;
    for (int i = 0; i < 4; ++i) h.stripes |= std::uint32_t(raw[11 + i]) << (8 * i);
    h.node_id = raw[15];
    h.file_size = 0;
    for (int i = 0; i < 8; ++i) h.file_size |= std::uint64_t(raw[16 + i]) << (8 * i);
    return h;
  }
};

namespace detail {

inline void require_byte_field(const msr_code& m) {
  if (m.fld().q() != 256)
    fail(errc::unsupported_order, "byte-mapped chunks need a GF(256) bundle");
}

inline std::string chunk_path(const std::string& dir, const std::string& prefix, int id) {
  return (std::filesystem::path(dir) / (prefix + ".node" + std::to_string(id) + ".bin"))
      .string();
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) fail(errc::io_error, "short write to " + path);
}

inline chunk_header expected_header(const msr_code& m, std::uint32_t stripes,
                                    std::uint64_t file_size, int node_id) {
  chunk_header h;
  h.q = std::uint16_t(m.fld().q());
  h.k = std::uint8_t(m.k());
  h.r = std::uint8_t(m.r());
  h.n = std::uint16_t(m.n());
  h.stripes = stripes;
  h.node_id = std::uint8_t(node_id);
  h.file_size = file_size;
  return h;
}

struct loaded_chunk {
  chunk_header header;
  std::vector<std::uint8_t> body;
};

inline loaded_chunk read_chunk(const msr_code& m, const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < chunk_header::size_bytes)
    fail(errc::parse_error, path + " is shorter than a chunk header");
  std::array<std::uint8_t, chunk_header::size_bytes> raw{};
  std::copy(bytes.begin(), bytes.begin() + chunk_header::size_bytes, raw.begin());
  loaded_chunk chunk{chunk_header::unpack(raw),
                     std::vector<std::uint8_t>(bytes.begin() + chunk_header::size_bytes,
                                               bytes.end())};
  const auto& h = chunk.header;
  if (h.q != m.fld().q() || h.k != m.k() || h.r != m.r() || h.n != m.n())
    fail(errc::parse_error, path + " was written with different code parameters");
  if (chunk.body.size() != std::size_t(h.stripes) * std::size_t(m.node_capacity()))
    fail(errc::parse_error, path + " has a truncated body");
  return chunk;
}

}  // namespace detail

/// Encode a file into k+r chunk files `<prefix>.node<id>.bin`. GF(256) only:
/// one byte per symbol, the final stripe zero-padded.
inline void encode_file(const msr_code& m, const std::string& in_path,
                        const std::string& out_dir, const std::string& prefix) {
  detail::require_byte_field(m);
  const auto bytes = detail::read_file_bytes(in_path);
  const int stripe_bytes = m.k() * m.node_capacity();
  const std::uint32_t stripes =
      std::uint32_t((bytes.size() + stripe_bytes - 1) / stripe_bytes);
  std::filesystem::create_directories(out_dir);

  std::vector<std::vector<std::uint8_t>> chunks(m.nodes());
  for (int id = 0; id < m.nodes(); ++id) {
    const auto packed = detail::expected_header(m, stripes, bytes.size(), id).pack();
    chunks[id].assign(packed.begin(), packed.end());
    chunks[id].reserve(chunk_header::size_bytes +
                       std::size_t(stripes) * m.node_capacity());
  }
  std::vector<std::vector<gf_vec>> data(m.k(), std::vector<gf_vec>(m.r()));
  for (std::uint32_t st = 0; st < stripes; ++st) {
    const std::size_t off = std::size_t(st) * stripe_bytes;
    for (int i = 0; i < m.k(); ++i)
      for (int l = 0; l < m.r(); ++l) {
        gf_vec& v = data[i][l];
        v.assign(std::size_t(m.n()), 0);
        for (int t = 0; t < m.n(); ++t) {
          const std::size_t pos = off + std::size_t(i) * m.node_capacity() + l * m.n() + t;
          if (pos < bytes.size()) v[t] = bytes[pos];
        }
      }
    const msr_codeword cw = encode(m, data);
    for (int id = 0; id < m.nodes(); ++id)
      for (elem sym : node_content(cw, id)) chunks[id].push_back(std::uint8_t(sym));
  }
  for (int id = 0; id < m.nodes(); ++id)
    detail::write_file_bytes(detail::chunk_path(out_dir, prefix, id), chunks[id]);
}

/// Regenerate one missing chunk from the other k+r-1, returning the summed
/// bandwidth trace across stripes.
inline repair_trace repair_chunk(const msr_code& m, const std::string& dir,
                                 const std::string& prefix, int node) {
  detail::require_byte_field(m);
  if (node < 0 || node >= m.nodes()) fail(errc::index_out_of_range, "node id");
  std::vector<detail::loaded_chunk> others(m.nodes());
  std::uint32_t stripes = 0;
  std::uint64_t file_size = 0;
  for (int id = 0; id < m.nodes(); ++id) {
    if (id == node) continue;
    others[id] = detail::read_chunk(m, detail::chunk_path(dir, prefix, id));
    if (others[id].header.node_id != id)
      fail(errc::parse_error, "chunk claims a different node id");
    stripes = others[id].header.stripes;
    file_size = others[id].header.file_size;
  }
  for (int id = 0; id < m.nodes(); ++id)
    if (id != node &&
        (others[id].header.stripes != stripes || others[id].header.file_size != file_size))
      fail(errc::parse_error, "chunks disagree about stripe count or file size");

  const auto packed = detail::expected_header(m, stripes, file_size, node).pack();
  std::vector<std::uint8_t> out(packed.begin(), packed.end());
  out.reserve(chunk_header::size_bytes + std::size_t(stripes) * m.node_capacity());

  repair_trace agg;
  agg.failed_node = node;
  agg.per_helper_nominal = m.n();
  agg.optimal = true;
  agg.access_optimal = true;
  const int cap = m.node_capacity();
  for (std::uint32_t st = 0; st < stripes; ++st) {
    std::vector<gf_vec> contents(m.nodes());
    for (int id = 0; id < m.nodes(); ++id) {
      contents[id].assign(std::size_t(cap), 0);
      if (id == node) continue;
      const std::size_t off = std::size_t(st) * cap;
      for (int t = 0; t < cap; ++t) contents[id][t] = others[id].body[off + t];
    }
    auto [restored, trace] = repair_node(m, node, codeword_from_nodes(m, contents));
    for (const auto& piece : restored)
      for (elem sym : piece) out.push_back(std::uint8_t(sym));
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
    agg.optimal_bandwidth += trace.optimal_bandwidth;
    agg.optimal = agg.optimal && trace.optimal;
    agg.access_optimal = agg.access_optimal && trace.access_optimal;
  }
  detail::write_file_bytes(detail::chunk_path(dir, prefix, node), out);
  return agg;
}

/// Rebuild the original file from any k chunks.
inline void reconstruct_file(const msr_code& m, const std::string& dir,
                             const std::string& prefix, const std::vector<int>& node_ids,
                             const std::string& out_path) {
  detail::require_byte_field(m);
  if (int(node_ids.size()) != m.k())
    fail(errc::wrong_count, "exactly k chunks must be named");
  std::vector<std::optional<detail::loaded_chunk>> chunks(m.nodes());
  std::uint32_t stripes = 0;
  std::uint64_t file_size = 0;
  bool first = true;
  for (int id : node_ids) {
    if (id < 0 || id >= m.nodes()) fail(errc::index_out_of_range, "node id");
    if (chunks[id]) fail(errc::wrong_count, "node listed twice");
    chunks[id] = detail::read_chunk(m, detail::chunk_path(dir, prefix, id));
    if (first) {
      stripes = chunks[id]->header.stripes;
      file_size = chunks[id]->header.file_size;
      first = false;
    } else if (chunks[id]->header.stripes != stripes ||
               chunks[id]->header.file_size != file_size) {
      fail(errc::parse_error, "chunks disagree about stripe count or file size");
    }
  }

  const int cap = m.node_capacity();
  std::vector<std::uint8_t> bytes;
  bytes.reserve(std::size_t(stripes) * m.k() * cap);
  for (std::uint32_t st = 0; st < stripes; ++st) {
    std::vector<std::optional<gf_vec>> nodes(m.nodes());
    for (int id = 0; id < m.nodes(); ++id) {
      if (!chunks[id]) continue;
      gf_vec v(std::size_t(cap), 0);
      const std::size_t off = std::size_t(st) * cap;
      for (int t = 0; t < cap; ++t) v[t] = chunks[id]->body[off + t];
      nodes[id] = std::move(v);
    }
    const auto data = reconstruct(m, nodes);
    for (int i = 0; i < m.k(); ++i)
      for (int l = 0; l < m.r(); ++l)
        for (elem sym : data[i][l]) bytes.push_back(std::uint8_t(sym));
  }
  if (bytes.size() < file_size)
    fail(errc::parse_error, "chunks shorter than the recorded file size");
  bytes.resize(file_size);
  detail::write_file_bytes(out_path, bytes);
}

}  // namespace msrforge
