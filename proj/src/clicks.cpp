#include "spincount/clicks.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace spincount {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'N', 'C', 'L', 'I', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  return static_cast<std::uint64_t>(get_u32(p)) | (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
}

nlohmann::json header_json(const ClickStream& s) {
  nlohmann::json j{{"sequence_count", s.sequence_count()},
                   {"record_length", s.record_length()},
                   {"cycle_duration", s.cycle_duration()}};
  if (!s.metadata().empty()) j["metadata"] = nlohmann::json::parse(s.metadata());
  return j;
}

}  // namespace

void ClickStream::append_sequence(std::span<const Click> clicks) {
  for (std::size_t i = 1; i < clicks.size(); ++i) {
    if (!(clicks[i].timestamp > clicks[i - 1].timestamp)) {
      throw std::invalid_argument("click timestamps must increase within a sequence");
    }
  }
  clicks_.insert(clicks_.end(), clicks.begin(), clicks.end());
  offsets_.push_back(clicks_.size());
}

std::size_t ClickStream::count_in(std::size_t i, double lo, double hi) const noexcept {
  const auto seq = sequence(i);
  const auto first = std::lower_bound(seq.begin(), seq.end(), lo,
                                      [](const Click& c, double t) { return c.timestamp < t; });
  const auto last = std::lower_bound(first, seq.end(), hi,
                                     [](const Click& c, double t) { return c.timestamp < t; });
  return static_cast<std::size_t>(last - first);
}

std::vector<ClickRecord> ClickStream::records() const {
  std::vector<ClickRecord> out;
  out.reserve(clicks_.size());
  for (std::size_t i = 0; i < sequence_count(); ++i) {
    for (const Click& c : sequence(i)) {
      out.push_back({static_cast<std::uint32_t>(i), c.cycle_index, c.timestamp});
    }
  }
  return out;
}

ClickStream ClickStream::from_records(std::span<const ClickRecord> records, std::size_t sequence_count,
                                      double record_length, double cycle_duration) {
  ClickStream s(record_length, cycle_duration);
  std::size_t r = 0;
  std::vector<Click> buf;
  for (std::size_t i = 0; i < sequence_count; ++i) {
    buf.clear();
    while (r < records.size() && records[r].sequence_index == i) {
      buf.push_back({records[r].cycle_index, records[r].timestamp});
      ++r;
    }
    s.append_sequence(buf);
  }
  if (r != records.size()) throw std::invalid_argument("records out of order or beyond sequence count");
  return s;
}

void ClickStream::write_binary(std::ostream& out) const {
  const std::string meta = header_json(*this).dump();
  std::string buf(kMagic, sizeof kMagic);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(meta.size()));
  buf += meta;
  buf.reserve(buf.size() + clicks_.size() * 16);
  for (std::size_t i = 0; i < sequence_count(); ++i) {
    for (const Click& c : sequence(i)) {
      put_u32(buf, static_cast<std::uint32_t>(i));
      put_u32(buf, c.cycle_index);
      put_u64(buf, std::bit_cast<std::uint64_t>(c.timestamp));
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ClickStream ClickStream::read_binary(std::istream& in) {
  unsigned char head[16];
  if (!in.read(reinterpret_cast<char*>(head), 16) || std::memcmp(head, kMagic, 8) != 0) {
    throw std::runtime_error("not a click stream file");
  }
  const std::uint32_t version = get_u32(head + 8);
  if (version != kVersion) throw std::runtime_error(fmt::format("unsupported click format version {}", version));
  std::string meta(get_u32(head + 12), '\0');
  if (!in.read(meta.data(), static_cast<std::streamsize>(meta.size()))) {
    throw std::runtime_error("truncated click stream header");
  }
  const auto j = nlohmann::json::parse(meta);
  std::vector<ClickRecord> records;
  unsigned char rec[16];
  while (in.read(reinterpret_cast<char*>(rec), 16)) {
    records.push_back({get_u32(rec), get_u32(rec + 4), std::bit_cast<double>(get_u64(rec + 8))});
  }
  if (in.gcount() != 0) throw std::runtime_error("truncated click record");
  ClickStream s = from_records(records, j.at("sequence_count").get<std::size_t>(),
                               j.at("record_length").get<double>(), j.at("cycle_duration").get<double>());
  if (j.contains("metadata")) s.metadata_ = j.at("metadata").dump();
  return s;
}

void ClickStream::write_text(std::ostream& out) const {
  fmt::print(out, "# spincount clicks v{}\n", kVersion);
  fmt::print(out, "# header {}\n", header_json(*this).dump());
  fmt::print(out, "# sequence cycle timestamp_s\n");
  for (std::size_t i = 0; i < sequence_count(); ++i) {
    for (const Click& c : sequence(i)) fmt::print(out, "{} {} {:.17g}\n", i, c.cycle_index, c.timestamp);
  }
}

ClickStream ClickStream::read_text(std::istream& in) {
  std::string line;
  nlohmann::json header;
  std::vector<ClickRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view tag = "# header ";
      if (line.rfind(tag, 0) == 0) header = nlohmann::json::parse(line.substr(tag.size()));
      continue;
    }
    std::istringstream row(line);
    ClickRecord r;
    if (!(row >> r.sequence_index >> r.cycle_index >> r.timestamp)) {
      throw std::runtime_error(fmt::format("malformed click row '{}'", line));
    }
    records.push_back(r);
  }
  if (header.is_null()) throw std::runtime_error("click text file lacks a header line");
  ClickStream s = from_records(records, header.at("sequence_count").get<std::size_t>(),
                               header.at("record_length").get<double>(),
                               header.at("cycle_duration").get<double>());
  if (header.contains("metadata")) s.metadata_ = header.at("metadata").dump();
  return s;
}

}  // namespace spincount
