#include "gridplan/reports.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"
#include "gridplan/hashing.hpp"

#include <algorithm>
#include <sstream>

namespace gridplan {

namespace {

using detail::format_double;

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string storage_list(const InvestmentPlan& plan) {
  std::vector<std::string> items;
  for (const auto& [id, kwh] : plan.storage_kwh) items.push_back(id + "=" + format_double(kwh));
  return join(items, ';');
}

std::string metric_table(const std::vector<NamedReport>& reports,
                         const std::vector<std::pair<std::string, double MetricReport::*>>& scalar_rows,
                         const std::vector<std::pair<std::string, std::pair<MetricSummary MetricReport::*, int>>>& rows) {
  std::string out = "metric";
  for (const auto& [name, report] : reports) out += "," + name;
  out += "\n";
  for (const auto& [label, member] : rows) {
    out += label;
    for (const auto& [name, report] : reports) {
      const auto& s = report.*(member.first);
      const double v = member.second == 0 ? s.mean : member.second == 1 ? s.cvar : s.worst;
      out += "," + format_double(v);
    }
    out += "\n";
  }
  for (const auto& [label, member] : scalar_rows) {
    out += label;
    for (const auto& [name, report] : reports) out += "," + format_double(report.*member);
    out += "\n";
  }
  return out;
}

const char* const kPalette[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49", "#5c4d7d", "#00798c", "#8d6a9f"};

class SvgChart {
public:
  SvgChart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void line(std::string name, std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({std::move(name), std::move(xs), std::move(ys), false});
  }
  void points(std::string name, std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({std::move(name), std::move(xs), std::move(ys), true});
  }

  std::string render() const {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series_) {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (first) {
          x0 = x1 = s.xs[i];
          y1 = s.ys[i];
          first = false;
        }
        x0 = std::min(x0, s.xs[i]);
        x1 = std::max(x1, s.xs[i]);
        y1 = std::max(y1, s.ys[i]);
        y0 = std::min(y0, s.ys[i]);
      }
    }
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    const double w = 640, h = 400, left = 70, right = 170, top = 40, bottom = 50;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << py(y0) << "\" x2=\"" << w - right << "\" y2=\"" << py(y0)
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << py(y0) << "\" x2=\"" << left << "\" y2=\"" << top
      << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
      o << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">"
        << detail::format_general(xv, 4) << "</text>\n";
      o << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << detail::format_general(yv, 4) << "</text>\n";
    }
    o << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << x_label_
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (top + h - bottom) / 2 << ")\">" << y_label_ << "</text>\n";
    for (std::size_t i = 0; i < series_.size(); ++i) {
      const auto& s = series_[i];
      const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
      if (s.scatter) {
        for (std::size_t k = 0; k < s.xs.size(); ++k) {
          o << "<circle cx=\"" << px(s.xs[k]) << "\" cy=\"" << py(s.ys[k]) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        }
      } else {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < s.xs.size(); ++k) o << (k ? " " : "") << px(s.xs[k]) << "," << py(s.ys[k]);
        o << "\"/>\n";
      }
      const double ly = top + 16.0 * static_cast<double>(i);
      o << "<rect x=\"" << w - right + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
        << "\"/>\n";
      o << "<text x=\"" << w - right + 28 << "\" y=\"" << ly << "\">" << s.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

private:
  struct Series {
    std::string name;
    std::vector<double> xs, ys;
    bool scatter;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace

std::string planning_table_csv(const std::vector<PlanningRow>& rows) {
  std::string out =
      "voll_usd_per_kwh,lambda,expected_loss_usd,cvar_loss_usd,line_investment_usd,storage_investment_usd,"
      "lines_built,storage_kwh,wall_time_s\n";
  for (const auto& r : rows) {
    const auto& c = r.decision.costs;
    out += format_double(r.voll_usd_per_kwh) + "," + format_double(r.lambda) + "," +
           format_double(c.expected_loss_usd) + "," + format_double(c.cvar_loss_usd) + "," +
           format_double(c.line_investment_usd) + "," + format_double(c.storage_investment_usd) + "," +
           join({r.decision.plan.lines.begin(), r.decision.plan.lines.end()}, ';') + "," +
           storage_list(r.decision.plan) + "," + format_double(r.decision.wall_time_s) + "\n";
  }
  return out;
}

std::vector<PlanningRow> read_planning_table(const std::filesystem::path& csv) {
  const auto t = detail::read_csv(csv, {"voll_usd_per_kwh", "lambda", "expected_loss_usd", "cvar_loss_usd",
                                        "line_investment_usd", "storage_investment_usd", "lines_built", "storage_kwh",
                                        "wall_time_s"});
  std::vector<PlanningRow> rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    PlanningRow row;
    row.voll_usd_per_kwh = t.number(r, "voll_usd_per_kwh");
    row.lambda = t.number(r, "lambda");
    auto& c = row.decision.costs;
    c.lambda = row.lambda;
    c.expected_loss_usd = t.number(r, "expected_loss_usd");
    c.cvar_loss_usd = t.number(r, "cvar_loss_usd");
    c.line_investment_usd = t.number(r, "line_investment_usd");
    c.storage_investment_usd = t.number(r, "storage_investment_usd");
    row.decision.wall_time_s = t.number(r, "wall_time_s");
    for (const auto& id : detail::split(t.text(r, "lines_built"), ';')) {
      if (!id.empty()) row.decision.plan.lines.insert(id);
    }
    for (const auto& item : detail::split(t.text(r, "storage_kwh"), ';')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw SchemaError(t.where(r) + ": storage entry '" + item + "' lacks '='");
      try {
        row.decision.plan.storage_kwh[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw SchemaError(t.where(r) + ": bad storage energy in '" + item + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ens_table_csv(const std::vector<NamedReport>& reports) {
  return metric_table(reports, {{"hourly_ens_cvar_kwh", &MetricReport::hourly_ens_cvar_kwh}},
                      {{"average_annual_ens_kwh", {&MetricReport::ens_kwh, 0}},
                       {"cvar_annual_ens_kwh", {&MetricReport::ens_kwh, 1}},
                       {"worst_annual_ens_kwh", {&MetricReport::ens_kwh, 2}}});
}

std::string reliability_table_csv(const std::vector<NamedReport>& reports) {
  return metric_table(reports, {},
                      {{"average_saifi", {&MetricReport::saifi, 0}},
                       {"cvar_saifi", {&MetricReport::saifi, 1}},
                       {"worst_saifi", {&MetricReport::saifi, 2}},
                       {"average_saidi_h", {&MetricReport::saidi, 0}},
                       {"cvar_saidi_h", {&MetricReport::saidi, 1}},
                       {"worst_saidi_h", {&MetricReport::saidi, 2}}});
}

std::string histogram_csv(const std::vector<NamedReport>& reports) {
  std::string out = "plan,bin,lower_kwh,upper_kwh,hours\n";
  for (const auto& [name, r] : reports) {
    for (std::size_t b = 0; b < r.hourly_ens.counts.size(); ++b) {
      out += name + "," + std::to_string(b) + "," + format_double(r.hourly_ens.edges[b]) + "," +
             format_double(r.hourly_ens.edges[b + 1]) + "," + std::to_string(r.hourly_ens.counts[b]) + "\n";
    }
  }
  return out;
}

std::string replay_csv(const std::vector<std::pair<std::string, ReplayResult>>& replays) {
  std::string out = "period,demand_kw";
  for (const auto& [name, r] : replays) out += "," + name;
  out += "\n";
  if (replays.empty()) return out;
  const auto& demand = replays.front().second.demand_kw;
  for (std::size_t t = 0; t < demand.size(); ++t) {
    out += std::to_string(t + 1) + "," + format_double(demand[t]);
    for (const auto& [name, r] : replays) out += "," + format_double(r.served_kw[t]);
    out += "\n";
  }
  return out;
}

std::string replay_svg(const std::vector<std::pair<std::string, ReplayResult>>& replays) {
  SvgChart chart("Served demand under the extreme event", "period", "served demand (kW)");
  if (!replays.empty()) {
    const auto& demand = replays.front().second.demand_kw;
    std::vector<double> xs(demand.size());
    for (std::size_t t = 0; t < xs.size(); ++t) xs[t] = static_cast<double>(t + 1);
    chart.line("demand", xs, demand);
    for (const auto& [name, r] : replays) chart.line(name, xs, r.served_kw);
  }
  return chart.render();
}

std::string histogram_svg(const std::vector<NamedReport>& reports) {
  SvgChart chart("Hourly energy not served", "hourly ENS (kWh)", "hours with ENS above bin start");
  for (const auto& [name, r] : reports) {
    std::vector<double> xs, ys;
    std::uint64_t above = r.hourly_ens.total();
    for (std::size_t b = 0; b < r.hourly_ens.counts.size(); ++b) {
      above -= r.hourly_ens.counts[b];
      xs.push_back(r.hourly_ens.edges[b + 1]);
      ys.push_back(static_cast<double>(above));
    }
    chart.line(name, xs, ys);
  }
  return chart.render();
}

std::string frontier_svg(const std::vector<PlanningRow>& rows) {
  SvgChart chart("Risk frontier", "expected loss cost (US$)", "CVaR loss cost (US$)");
  std::vector<double> volls;
  for (const auto& r : rows) {
    if (std::find(volls.begin(), volls.end(), r.voll_usd_per_kwh) == volls.end()) volls.push_back(r.voll_usd_per_kwh);
  }
  for (const double v : volls) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      if (r.voll_usd_per_kwh != v) continue;
      xs.push_back(r.decision.costs.expected_loss_usd);
      ys.push_back(r.decision.costs.cvar_loss_usd);
    }
    chart.points("VoLL " + format_double(v), xs, ys);
  }
  return chart.render();
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<ManifestInput>& inputs, const std::vector<std::filesystem::path>& outputs,
                             const std::string& solver_version, const std::filesystem::path& output_root) {
  nlohmann::json in = nlohmann::json::array();
  for (const auto& i : inputs) {
    if (std::filesystem::is_directory(i.path)) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(i.path)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        in.push_back({{"role", i.role}, {"path", f.string()}, {"hash", file_hash(f)}});
      }
    } else {
      in.push_back({{"role", i.role}, {"path", i.path.string()}, {"hash", file_hash(i.path)}});
    }
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : outputs) {
    const auto shown = output_root.empty() ? p.filename() : p.lexically_relative(output_root);
    out.push_back({{"path", shown.generic_string()}, {"hash", file_hash(p)}});
  }
  return {{"command", command},
          {"config", config},
          {"config_hash", blob_hash(config.dump())},
          {"inputs", in},
          {"outputs", out},
          {"solver_version", solver_version}};
}

}  // namespace gridplan
