#include "swim/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "swim/errors.hpp"

namespace swim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto begin = s.find_first_not_of(" \t\r", pos);
    if (begin == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r", begin);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(begin, end - begin));
    pos = end;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

template <typename T>
T require_number(std::string_view s, std::size_t line, const char* what) {
  const auto v = parse_number<T>(s);
  if (!v) throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  return *v;
}

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::Meet: return "Meet";
    case EventKind::Depart: return "Depart";
    case EventKind::Start: return "Start";
    case EventKind::Finish: return "Finish";
  }
  return "?";
}

std::optional<EventKind> kind_from(std::string_view s) {
  if (s == "Meet") return EventKind::Meet;
  if (s == "Depart") return EventKind::Depart;
  if (s == "Start") return EventKind::Start;
  if (s == "Finish") return EventKind::Finish;
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

constexpr std::string_view kLogMagic = "swim-event-log";

}  // namespace

void DatasetMeta::validate() const {
  if (mobile_count > device_count)
    throw ValidationError("mobile_count exceeds device_count in dataset '" + name + "'");
}

std::string format_time(double seconds) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, seconds, std::chars_format::fixed, 6);
  std::string s(buf, ptr);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_event_log(const EventLog& log, std::ostream& out) {
  if (log.header) {
    out << "# " << kLogMagic << " nodes=" << log.header->node_count
        << " duration=" << format_time(log.header->duration) << " seed=" << log.header->seed
        << '\n';
  }
  for (const auto& e : log.events) {
    out << kind_name(e.kind) << ' ' << format_time(e.time) << ' ' << e.node << ' ';
    if (e.is_pair_event())
      out << e.peer;
    else
      out << e.cell.row << ' ' << e.cell.col;
    out << '\n';
  }
}

EventLog read_event_log(std::istream& in) {
  EventLog log;
  std::string raw;
  std::size_t line_no = 0;
  double last_time = 0.0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto parts = tokens(line.substr(1));
      if (!parts.empty() && parts[0] == kLogMagic) {
        LogHeader h;
        for (std::size_t k = 1; k < parts.size(); ++k) {
          const auto eq = parts[k].find('=');
          if (eq == std::string_view::npos) throw ParseError(line_no, "bad header field");
          const auto key = parts[k].substr(0, eq);
          const auto value = parts[k].substr(eq + 1);
          if (key == "nodes") h.node_count = require_number<std::size_t>(value, line_no, "node count");
          else if (key == "duration") h.duration = require_number<double>(value, line_no, "duration");
          else if (key == "seed") h.seed = require_number<std::uint64_t>(value, line_no, "seed");
        }
        log.header = h;
      }
      continue;
    }

    const auto parts = tokens(line);
    if (parts.empty()) continue;
    const auto kind = kind_from(parts[0]);
    if (!kind) throw ParseError(line_no, "unknown event kind '" + std::string(parts[0]) + "'");
    EventRecord e;
    e.kind = *kind;
    const std::size_t expected = e.is_pair_event() ? 4 : 5;
    if (parts.size() != expected)
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                    std::to_string(parts.size()));
    e.time = require_number<double>(parts[1], line_no, "time");
    e.node = require_number<NodeId>(parts[2], line_no, "node id");
    if (e.is_pair_event()) {
      e.peer = require_number<NodeId>(parts[3], line_no, "node id");
      if (e.peer == e.node) throw ValidationError("line " + std::to_string(line_no) + ": self contact");
      if (e.peer < e.node) std::swap(e.peer, e.node);
    } else {
      e.cell.row = require_number<int>(parts[3], line_no, "cell row");
      e.cell.col = require_number<int>(parts[4], line_no, "cell column");
    }
    if (e.time < 0.0) throw ValidationError("line " + std::to_string(line_no) + ": negative time");
    if (!log.events.empty() && e.time < last_time)
      throw ValidationError("line " + std::to_string(line_no) + ": time goes backwards");
    last_time = e.time;
    log.events.push_back(e);
  }
  return log;
}

std::vector<ContactRecord> contacts_from_events(const EventLog& log, double end_time) {
  std::map<std::pair<NodeId, NodeId>, double> open;
  std::vector<ContactRecord> out;
  for (const auto& e : log.events) {
    if (!e.is_pair_event()) continue;
    const auto key = std::make_pair(std::min(e.node, e.peer), std::max(e.node, e.peer));
    if (e.kind == EventKind::Meet) {
      if (!open.emplace(key, e.time).second)
        throw ValidationError("Meet of " + std::to_string(key.first) + "-" +
                              std::to_string(key.second) + " while already in contact");
    } else {
      const auto it = open.find(key);
      if (it == open.end())
        throw ValidationError("Depart of " + std::to_string(key.first) + "-" +
                              std::to_string(key.second) + " without a prior Meet");
      if (e.time > it->second) out.push_back({key.first, key.second, it->second, e.time});
      open.erase(it);
    }
  }
  for (const auto& [key, start] : open)
    if (end_time > start) out.push_back({key.first, key.second, start, end_time});

  std::sort(out.begin(), out.end(), [](const ContactRecord& x, const ContactRecord& y) {
    return std::tie(x.a, x.b, x.start) < std::tie(y.a, y.b, y.start);
  });
  return out;
}

ContactTrace trace_from_event_log(const EventLog& log) {
  ContactTrace trace;
  std::size_t n = 0;
  double end = 0.0;
  if (log.header) {
    n = log.header->node_count;
    end = log.header->duration;
  }
  for (const auto& e : log.events) {
    n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(e.node, e.peer)) + 1);
    end = std::max(end, e.time);
  }
  trace.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) trace.nodes[i] = static_cast<NodeId>(i);
  trace.start_time = 0.0;
  trace.end_time = end;
  trace.contacts = contacts_from_events(log, end);
  return trace;
}

std::vector<PairGaps> inter_contact_from_contacts(const std::vector<ContactRecord>& contacts) {
  std::vector<PairGaps> out;
  for (std::size_t k = 0; k < contacts.size(); ++k) {
    const auto& c = contacts[k];
    if (k == 0 || contacts[k - 1].a != c.a || contacts[k - 1].b != c.b) {
      out.push_back({c.a, c.b, {}});
      continue;
    }
    out.back().gaps.push_back(c.start - contacts[k - 1].end);
  }
  std::erase_if(out, [](const PairGaps& p) { return p.gaps.empty(); });
  return out;
}

std::vector<double> all_gaps(const std::vector<PairGaps>& per_pair) {
  std::vector<double> out;
  for (const auto& p : per_pair) out.insert(out.end(), p.gaps.begin(), p.gaps.end());
  return out;
}

ContactTrace import_contact_trace(std::istream& in, std::optional<DatasetMeta> meta) {
  DatasetMeta header_meta;
  bool saw_header = false;
  std::vector<ContactRecord> raw_contacts;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto value = trim(body.substr(eq + 1));
      saw_header = true;
      if (key == "name") header_meta.name = std::string(value);
      else if (key == "device") header_meta.device = std::string(value);
      else if (key == "duration_days") header_meta.duration_days = require_number<double>(value, line_no, "duration_days");
      else if (key == "granularity_s") header_meta.granularity_s = require_number<double>(value, line_no, "granularity_s");
      else if (key == "device_count") header_meta.device_count = require_number<std::size_t>(value, line_no, "device_count");
      else if (key == "mobile_count") header_meta.mobile_count = require_number<std::size_t>(value, line_no, "mobile_count");
      else if (key == "reported_contacts") header_meta.reported_contacts = require_number<std::size_t>(value, line_no, "reported_contacts");
      else if (key == "reported_contacts_per_pair_day") header_meta.reported_contacts_per_pair_day = require_number<double>(value, line_no, "reported_contacts_per_pair_day");
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw ParseError(line_no, "expected id1,id2,start,end; got " + std::to_string(fields.size()) + " fields");
    ContactRecord c;
    c.a = require_number<NodeId>(fields[0], line_no, "node id");
    c.b = require_number<NodeId>(fields[1], line_no, "node id");
    c.start = require_number<double>(fields[2], line_no, "start time");
    c.end = require_number<double>(fields[3], line_no, "end time");
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (c.a == c.b) throw ValidationError(where + "self contact");
    if (c.end < c.start) throw ValidationError(where + "negative contact duration");
    if (c.end == c.start) throw ValidationError(where + "zero-length contact");
    if (c.a > c.b) std::swap(c.a, c.b);
    raw_contacts.push_back(c);
  }

  if (!meta && saw_header) meta = header_meta;
  if (meta) meta->validate();

  ContactTrace trace;
  trace.meta = meta;
  const bool bounded_ids = meta && meta->device_count > 0;
  if (bounded_ids) {
    for (const auto& c : raw_contacts)
      if (c.a < 1 || c.b > meta->device_count)
        throw ValidationError("node id outside 1.." + std::to_string(meta->device_count) +
                              " in contact " + std::to_string(c.a) + "," + std::to_string(c.b));
    for (std::size_t i = 1; i <= meta->device_count; ++i) trace.nodes.push_back(static_cast<NodeId>(i));
  } else {
    std::set<NodeId> ids;
    for (const auto& c : raw_contacts) {
      ids.insert(c.a);
      ids.insert(c.b);
    }
    trace.nodes.assign(ids.begin(), ids.end());
  }

  std::sort(raw_contacts.begin(), raw_contacts.end(), [](const ContactRecord& x, const ContactRecord& y) {
    return std::tie(x.a, x.b, x.start, x.end) < std::tie(y.a, y.b, y.start, y.end);
  });
  for (const auto& c : raw_contacts) {
    auto& merged = trace.contacts;
    if (!merged.empty() && merged.back().a == c.a && merged.back().b == c.b &&
        c.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, c.end);
    } else {
      merged.push_back(c);
    }
  }

  if (!trace.contacts.empty()) {
    double lo = trace.contacts.front().start;
    double hi = trace.contacts.front().end;
    for (const auto& c : trace.contacts) {
      lo = std::min(lo, c.start);
      hi = std::max(hi, c.end);
    }
    trace.start_time = meta ? std::min(0.0, lo) : lo;
    trace.end_time = hi;
  }
  if (meta && meta->duration_days > 0.0)
    trace.end_time = std::max(trace.end_time, trace.start_time + meta->duration_days * 86400.0);
  return trace;
}

void write_contact_csv(const ContactTrace& trace, std::ostream& out) {
  if (trace.meta) {
    const auto& m = *trace.meta;
    out << "# name=" << m.name << '\n'
        << "# device=" << m.device << '\n'
        << "# duration_days=" << format_number(m.duration_days) << '\n'
        << "# granularity_s=" << format_number(m.granularity_s) << '\n'
        << "# device_count=" << m.device_count << '\n'
        << "# mobile_count=" << m.mobile_count << '\n';
    if (m.reported_contacts) out << "# reported_contacts=" << *m.reported_contacts << '\n';
    if (m.reported_contacts_per_pair_day)
      out << "# reported_contacts_per_pair_day=" << format_number(*m.reported_contacts_per_pair_day) << '\n';
  }
  for (const auto& c : trace.contacts)
    out << c.a << ',' << c.b << ',' << format_time(c.start) << ',' << format_time(c.end) << '\n';
}

ContactTrace load_trace(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open trace '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();

  bool csv = false;
  std::istringstream scan(text);
  std::string line;
  while (std::getline(scan, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (t.find("=") != std::string_view::npos && t.find(kLogMagic) == std::string_view::npos)
        csv = true;
      continue;
    }
    csv = t.find(',') != std::string_view::npos;
    break;
  }

  std::istringstream in(text);
  if (csv) return import_contact_trace(in);
  return trace_from_event_log(read_event_log(in));
}

}  // namespace swim
