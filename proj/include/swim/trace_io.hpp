#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swim/simulator.hpp"

namespace swim {

/// A closed visibility interval of an unordered pair, stored with a < b.
struct ContactRecord {
  NodeId a = 0;
  NodeId b = 0;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }

  friend bool operator==(const ContactRecord&, const ContactRecord&) = default;
};

/// Descriptive metadata of a trace, carried in the CSV comment header.
struct DatasetMeta {
  std::string name;
  std::string device;
  double duration_days = 0.0;
  double granularity_s = 0.0;
  std::size_t device_count = 0;
  std::size_t mobile_count = 0;
  /// Published aggregates, when known; informational only.
  std::optional<std::size_t> reported_contacts;
  std::optional<double> reported_contacts_per_pair_day;

  /// Throws ValidationError if mobile_count > device_count.
  void validate() const;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// A contact set plus the node population and observation span it was
/// drawn from. Pairs that never meet still count as pairs.
struct ContactTrace {
  std::vector<NodeId> nodes;
  /// Sorted by (a, b, start); same-pair intervals disjoint.
  std::vector<ContactRecord> contacts;
  double start_time = 0.0;
  double end_time = 0.0;
  std::optional<DatasetMeta> meta;

  double span() const { return end_time - start_time; }
};

// Event log text format, one event per line:
//   Meet|Depart <time> <id1> <id2>
//   Start|Finish <time> <node> <cell_row> <cell_col>
// Times are fixed-point with six decimals. An optional first line
//   # swim-event-log nodes=<n> duration=<seconds> seed=<seed>
// carries the run header; other '#' lines are ignored on read.

void write_event_log(const EventLog& log, std::ostream& out);
/// Throws ParseError (with line number) or ValidationError.
EventLog read_event_log(std::istream& in);

std::string format_time(double seconds);

/// Pairs each Meet with the next Depart of the same pair. A Meet still open
/// at the end closes at `end_time`. Contacts that round to zero length are
/// dropped. Throws ValidationError on Depart-before-Meet or a double Meet.
std::vector<ContactRecord> contacts_from_events(const EventLog& log, double end_time);

/// Contact trace of a simulator log: nodes 0..n-1, span [0, duration].
ContactTrace trace_from_event_log(const EventLog& log);

struct PairGaps {
  NodeId a = 0;
  NodeId b = 0;
  std::vector<double> gaps;
};

/// For each pair with at least two contacts, the idle gaps s_{k+1} - e_k.
/// Input must be sorted by (a, b, start).
std::vector<PairGaps> inter_contact_from_contacts(const std::vector<ContactRecord>& contacts);

/// Every gap of every pair, in pair order.
std::vector<double> all_gaps(const std::vector<PairGaps>& per_pair);

// Contact CSV: optional "# key=value" header lines with DatasetMeta fields,
// then one "id1,id2,start,end" row per contact.

/// Reads a contact CSV. `meta`, when given, overrides the file header.
/// Ids are validated against [1, device_count] whenever metadata is
/// available. Pairs are normalized, sorted, and overlapping or touching
/// intervals merged.
ContactTrace import_contact_trace(std::istream& in, std::optional<DatasetMeta> meta = std::nullopt);

void write_contact_csv(const ContactTrace& trace, std::ostream& out);

/// Sniffs a file: contact CSV if a data line has commas, else event log.
ContactTrace load_trace(const std::string& path);

}  // namespace swim
