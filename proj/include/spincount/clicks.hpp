#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spincount {

struct ClickRecord {
  std::uint32_t sequence_index = 0;
  std::uint32_t cycle_index = 0;
  double timestamp = 0.0;  // s after the end of the pulse block

  bool operator==(const ClickRecord&) const = default;
};

/// One detector click inside a sequence (the sequence index is implicit).
struct Click {
  std::uint32_t cycle_index = 0;
  double timestamp = 0.0;

  bool operator==(const Click&) const = default;
};

/// Clicks of `sequence_count` consecutive sequences, stored contiguously with
/// per-sequence offsets. Timestamps are strictly increasing within a sequence.
class ClickStream {
 public:
  ClickStream() : offsets_{0} {}
  ClickStream(double record_length, double cycle_duration)
      : record_length_(record_length), cycle_duration_(cycle_duration), offsets_{0} {}

  /// Appends the next sequence; `clicks` must be sorted by time.
  void append_sequence(std::span<const Click> clicks);
  void append_sequence(std::initializer_list<Click> clicks) {
    append_sequence(std::span<const Click>(clicks.begin(), clicks.size()));
  }

  std::size_t sequence_count() const noexcept { return offsets_.size() - 1; }
  std::size_t click_count() const noexcept { return clicks_.size(); }
  std::span<const Click> sequence(std::size_t i) const noexcept {
    return {clicks_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Clicks of sequence i with lo <= t < hi.
  std::size_t count_in(std::size_t i, double lo, double hi) const noexcept;

  double record_length() const noexcept { return record_length_; }
  double cycle_duration() const noexcept { return cycle_duration_; }

  /// Free-form JSON metadata carried through the binary format.
  const std::string& metadata() const noexcept { return metadata_; }
  void set_metadata(std::string m) { metadata_ = std::move(m); }

  std::vector<ClickRecord> records() const;
  static ClickStream from_records(std::span<const ClickRecord> records, std::size_t sequence_count,
                                  double record_length, double cycle_duration);

  /// Binary: "SPNCLICK", u32 version, u32 metadata length, metadata JSON,
  /// then little-endian records (u32 sequence, u32 cycle, f64 time).
  void write_binary(std::ostream& out) const;
  static ClickStream read_binary(std::istream& in);

  /// Text: '#' header lines, then "sequence cycle timestamp" rows with
  /// round-trip precision.
  void write_text(std::ostream& out) const;
  static ClickStream read_text(std::istream& in);

  bool operator==(const ClickStream&) const = default;

 private:
  double record_length_ = 0.0;
  double cycle_duration_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<Click> clicks_;
  std::string metadata_;
};

}  // namespace spincount
