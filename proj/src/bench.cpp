#include "depthkit/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "depthkit/error.hpp"
#include "depthkit/io.hpp"

namespace depthkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view direction_name(Direction d) {
  return d == Direction::kLowerBetter ? "lower_better" : "higher_better";
}

Direction parse_direction_name(const std::string& s) {
  if (s == "lower_better") return Direction::kLowerBetter;
  if (s == "higher_better") return Direction::kHigherBetter;
  fail(ErrorCode::kParseError, "unknown direction '" + s + "'");
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v) == 0.0 ? 0.0 : v);
  return buf;
}

std::string signed2(double v) {
  const std::string s = fixed2(v);
  return (s[0] == '-') ? s : "+" + s;
}

}  // namespace

const std::vector<double>* ResultTable::find(std::string_view method) const {
  for (const auto& [name, values] : rows) {
    if (name == method) return &values;
  }
  return nullptr;
}

void ResultTable::validate() const {
  if (columns.empty()) fail(ErrorCode::kParseError, task + ": table has no metric columns");
  std::set<std::string> seen;
  for (const auto& [name, values] : rows) {
    if (!seen.insert(name).second) {
      fail(ErrorCode::kParseError, task + ": duplicate method '" + name + "'");
    }
    if (values.size() != columns.size()) {
      fail(ErrorCode::kParseError, task + ": row '" + name + "' has " +
                                       std::to_string(values.size()) + " values, expected " +
                                       std::to_string(columns.size()));
    }
    for (const double v : values) {
      if (!std::isfinite(v)) {
        fail(ErrorCode::kParseError, task + ": non-finite value in row '" + name + "'");
      }
    }
  }
  if (!find(baseline)) {
    fail(ErrorCode::kInvalidArgument, task + ": baseline '" + baseline + "' not in table");
  }
  if (excluded.contains(baseline)) {
    fail(ErrorCode::kInvalidArgument, task + ": baseline cannot be excluded");
  }
  for (const auto& name : excluded) {
    if (!find(name)) {
      fail(ErrorCode::kInvalidArgument, task + ": excluded method '" + name + "' not in table");
    }
  }
}

ResultTable parse_table_csv(const std::string& text, std::string task,
                            const std::string& baseline) {
  ResultTable table;
  table.task = std::move(task);
  table.baseline = baseline;

  std::istringstream in(text);
  std::string raw;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("task:", 0) == 0) {
        table.task = trim(std::string_view(body).substr(5));
      } else if (body.rfind("exclude:", 0) == 0) {
        for (auto& name : split(std::string_view(body).substr(8), ',')) {
          if (!name.empty()) table.excluded.insert(name);
        }
      }
      continue;
    }

    const auto cells = split(line, ',');
    if (!have_header) {
      if (lower(cells[0]) != "method") {
        fail(ErrorCode::kParseError, "header must start with 'method'");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        const auto colon = cells[c].rfind(':');
        if (colon == std::string::npos) {
          fail(ErrorCode::kParseError,
               "column '" + cells[c] + "' lacks a ':up' or ':down' direction suffix");
        }
        const std::string name = trim(std::string_view(cells[c]).substr(0, colon));
        const std::string dir = lower(trim(std::string_view(cells[c]).substr(colon + 1)));
        Direction direction;
        if (dir == "up") {
          direction = Direction::kHigherBetter;
        } else if (dir == "down") {
          direction = Direction::kLowerBetter;
        } else {
          fail(ErrorCode::kParseError, "unknown direction suffix '" + dir + "'");
        }
        if (name.empty()) fail(ErrorCode::kParseError, "empty column name");
        table.columns.push_back({name, direction});
      }
      have_header = true;
      continue;
    }

    if (cells.size() != table.columns.size() + 1) {
      fail(ErrorCode::kParseError, "ragged row on line " + std::to_string(line_no));
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || end != cells[c].c_str() + cells[c].size()) {
        fail(ErrorCode::kParseError,
             "bad value '" + cells[c] + "' on line " + std::to_string(line_no));
      }
      values.push_back(v);
    }
    table.rows.emplace_back(cells[0], std::move(values));
  }
  if (!have_header) fail(ErrorCode::kParseError, "table has no header");
  table.validate();
  return table;
}

ResultTable parse_table_json(const std::string& text, const std::string& baseline) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("invalid JSON: ") + e.what());
  }
  ResultTable table;
  try {
    table.task = j.value("task", std::string{});
    for (const auto& c : j.at("columns")) {
      table.columns.push_back(
          {c.at("name").get<std::string>(), parse_direction_name(c.at("direction").get<std::string>())});
    }
    for (const auto& [name, values] : j.at("rows").items()) {
      table.rows.emplace_back(name, values.get<std::vector<double>>());
    }
    table.baseline = baseline.empty() ? j.value("baseline", std::string{}) : baseline;
    if (j.contains("excluded")) {
      for (const auto& name : j.at("excluded")) table.excluded.insert(name.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed table JSON: ") + e.what());
  }
  table.validate();
  return table;
}

std::string table_to_json(const ResultTable& table) {
  ordered_json j;
  j["task"] = table.task;
  j["columns"] = ordered_json::array();
  for (const auto& c : table.columns) {
    j["columns"].push_back({{"name", c.name}, {"direction", direction_name(c.direction)}});
  }
  j["rows"] = ordered_json::object();
  for (const auto& [name, values] : table.rows) j["rows"][name] = values;
  j["baseline"] = table.baseline;
  j["excluded"] = std::vector<std::string>(table.excluded.begin(), table.excluded.end());
  return j.dump(2);
}

ResultTable load_table(const std::filesystem::path& path, TableFormat format,
                       const std::string& baseline) {
  const std::string text = read_text_file(path);
  if (format == TableFormat::kJson) return parse_table_json(text, baseline);
  if (baseline.empty()) {
    fail(ErrorCode::kInvalidArgument, path.string() + ": CSV tables need a baseline name");
  }
  return parse_table_csv(text, path.stem().string(), baseline);
}

ResultTable load_table(const std::filesystem::path& path, const std::string& baseline) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".json") return load_table(path, TableFormat::kJson, baseline);
  if (ext == ".csv") return load_table(path, TableFormat::kCsv, baseline);
  fail(ErrorCode::kInvalidArgument, "unsupported table format: " + path.string());
}

double improvement_ratio(const ResultTable& table, std::string_view method) {
  const auto* base = table.find(table.baseline);
  const auto* row = table.find(method);
  if (!base) fail(ErrorCode::kInvalidArgument, "baseline '" + table.baseline + "' missing");
  if (!row) fail(ErrorCode::kInvalidArgument, "method '" + std::string(method) + "' missing");

  double sum = 0.0;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const double b = (*base)[c];
    const double v = (*row)[c];
    if (b == 0.0) {
      fail(ErrorCode::kDegenerateBaseline,
           table.task + ": baseline cell '" + table.columns[c].name + "' is zero");
    }
    const double gain = table.columns[c].direction == Direction::kLowerBetter ? b - v : v - b;
    sum += 100.0 * gain / b;
  }
  return sum / static_cast<double>(table.columns.size());
}

std::map<std::string, int> task_rank(const ResultTable& table) {
  std::vector<std::pair<std::string, double>> candidates;
  for (const auto& [name, values] : table.rows) {
    if (name == table.baseline || table.excluded.contains(name)) continue;
    candidates.emplace_back(name, improvement_ratio(table, name));
  }
  if (candidates.empty()) {
    fail(ErrorCode::kInvalidArgument, table.task + ": no rankable methods");
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::map<std::string, int> ranks;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const bool tied = i > 0 && candidates[i].second == candidates[i - 1].second;
    ranks[candidates[i].first] = tied ? ranks[candidates[i - 1].first] : static_cast<int>(i) + 1;
  }
  return ranks;
}

RankReport average_rank(const std::vector<ResultTable>& tables) {
  if (tables.empty()) fail(ErrorCode::kInvalidArgument, "no tables to rank");
  RankReport report;
  std::map<std::string, double> rank_sum;
  for (const auto& table : tables) {
    const auto ranks = task_rank(table);
    TaskResult task{table.task, {}};
    for (const auto& [name, values] : table.rows) {
      if (name == table.baseline) continue;
      TaskEntry entry{improvement_ratio(table, name), std::nullopt};
      if (const auto it = ranks.find(name); it != ranks.end()) {
        entry.rank = it->second;
        rank_sum[name] += it->second;
        ++report.tasks_counted[name];
      }
      task.methods[name] = entry;
    }
    report.per_task.push_back(std::move(task));
  }
  for (const auto& [name, sum] : rank_sum) {
    report.average_rank[name] = sum / report.tasks_counted[name];
  }
  return report;
}

std::string emit_report(const RankReport& report, ReportFormat format) {
  if (report.per_task.empty()) fail(ErrorCode::kInvalidArgument, "report has no tasks");

  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["tasks"] = ordered_json::array();
    for (const auto& t : report.per_task) {
      ordered_json methods = ordered_json::object();
      for (const auto& [name, e] : t.methods) {
        methods[name] = {{"imp", round2(e.imp_percent)},
                         {"rank", e.rank ? ordered_json(*e.rank) : ordered_json(nullptr)}};
      }
      j["tasks"].push_back({{"task", t.task}, {"methods", methods}});
    }
    j["average_rank"] = ordered_json::object();
    for (const auto& [name, r] : report.average_rank) j["average_rank"][name] = round2(r);
    j["tasks_counted"] = report.tasks_counted;
    return j.dump(2) + "\n";
  }

  std::set<std::string> names;
  for (const auto& t : report.per_task) {
    for (const auto& [name, e] : t.methods) names.insert(name);
  }
  std::vector<std::string> order(names.begin(), names.end());
  const bool single = report.per_task.size() == 1;
  auto sort_key = [&](const std::string& name) -> double {
    if (single) {
      const auto& e = report.per_task.front().methods.at(name);
      return e.rank ? *e.rank : 1e9;
    }
    const auto it = report.average_rank.find(name);
    return it == report.average_rank.end() ? 1e9 : it->second;
  };
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return sort_key(a) < sort_key(b);
  });

  std::string md = "| Method |";
  std::string rule = "|---|";
  if (!single) {
    md += " Avg. rank |";
    rule += "---:|";
  }
  for (const auto& t : report.per_task) {
    md += " " + t.task + " imp. (%) | " + t.task + " rank |";
    rule += "---:|---:|";
  }
  md += "\n" + rule + "\n";
  for (const auto& name : order) {
    md += "| " + name + " |";
    if (!single) {
      const auto it = report.average_rank.find(name);
      md += " " + (it == report.average_rank.end() ? std::string("-") : fixed2(it->second)) + " |";
    }
    for (const auto& t : report.per_task) {
      const auto it = t.methods.find(name);
      if (it == t.methods.end()) {
        md += "  |  |";
        continue;
      }
      md += " " + signed2(it->second.imp_percent) + " | " +
            (it->second.rank ? std::to_string(*it->second.rank) : std::string("-")) + " |";
    }
    md += "\n";
  }
  return md;
}

RankReport parse_report_json(const std::string& text) {
  RankReport report;
  try {
    const auto j = ordered_json::parse(text);
    for (const auto& t : j.at("tasks")) {
      TaskResult task{t.at("task").get<std::string>(), {}};
      for (const auto& [name, e] : t.at("methods").items()) {
        TaskEntry entry{e.at("imp").get<double>(), std::nullopt};
        if (!e.at("rank").is_null()) entry.rank = e.at("rank").get<int>();
        task.methods[name] = entry;
      }
      report.per_task.push_back(std::move(task));
    }
    for (const auto& [name, r] : j.at("average_rank").items()) {
      report.average_rank[name] = r.get<double>();
    }
    for (const auto& [name, c] : j.at("tasks_counted").items()) {
      report.tasks_counted[name] = c.get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

}  // namespace depthkit
