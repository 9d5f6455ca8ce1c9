#include "tropnnc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "tropnnc/train.hpp"

namespace tropnnc {

namespace {

std::size_t thread_cap(std::size_t cells) {
    std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TROPNNC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<std::size_t>(v);
    }
    return std::min(cap, std::max<std::size_t>(1, cells));
}

} // namespace

ExperimentTable run_experiment(const ExperimentSpec& spec) {
    if (spec.methods.empty() || spec.ratios.empty() || spec.seeds.empty())
        throw ConfigError("experiment: methods, ratios, and seeds must be nonempty");
    if (!spec.model_for_seed) throw ConfigError("experiment: no model source");

    // one trained/loaded model per seed, shared read-only by the cells
    std::map<std::uint64_t, Network> models;
    for (std::uint64_t s : spec.seeds)
        if (!models.count(s)) models.emplace(s, spec.model_for_seed(s));

    ExperimentTable table;
    for (const auto m : spec.methods)
        for (const double ratio : spec.ratios)
            for (const std::uint64_t s : spec.seeds) {
                ExperimentCell cell;
                cell.method = method_name(m);
                cell.target = ratio;
                cell.seed = s;
                table.cells.push_back(std::move(cell));
            }

    auto run_cell = [&](std::size_t idx) {
        ExperimentCell& cell = table.cells[idx];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            CompressionConfig config;
            config.method = *parse_method(cell.method);
            config.ratio = cell.target;
            config.seed = cell.seed;
            config.num_iter = spec.num_iter;
            auto [compressed, rep] = compress_network(models.at(cell.seed), config);
            cell.accuracy = eval_accuracy(compressed, spec.test);
            cell.params = rep.params_after;
            cell.flops = rep.flops_after;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    };

    const std::size_t workers = thread_cap(table.cells.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < table.cells.size(); ++i) run_cell(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= table.cells.size()) break;
                    run_cell(i);
                }
            });
        for (auto& t : pool) t.join();
    }

    // mean +- std per (method, target)
    for (const auto m : spec.methods) {
        for (const double ratio : spec.ratios) {
            std::vector<double> accs;
            for (const auto& cell : table.cells)
                if (cell.ok && cell.method == method_name(m) && cell.target == ratio)
                    accs.push_back(cell.accuracy);
            ExperimentSummary s;
            s.method = method_name(m);
            s.target = ratio;
            s.cells = accs.size();
            if (!accs.empty()) {
                double mean = 0.0;
                for (double a : accs) mean += a;
                mean /= double(accs.size());
                double var = 0.0;
                for (double a : accs) var += (a - mean) * (a - mean);
                s.mean_accuracy = mean;
                s.std_accuracy = accs.size() > 1 ? std::sqrt(var / double(accs.size() - 1)) : 0.0;
            }
            table.summaries.push_back(std::move(s));
        }
    }
    return table;
}

std::string ExperimentTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "method,target,seed,accuracy,params,flops,wall_ms\n";
    for (const auto& c : cells) {
        os << c.method << ',' << c.target << ',' << c.seed << ',';
        if (c.ok)
            os << c.accuracy;
        else
            os << "error:" << c.error;
        os << ',' << c.params << ',' << c.flops << ',' << c.wall_ms << '\n';
    }
    return os.str();
}

std::string ExperimentTable::summary_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "method,target,mean_accuracy,std_accuracy,cells\n";
    for (const auto& s : summaries)
        os << s.method << ',' << s.target << ',' << s.mean_accuracy << ',' << s.std_accuracy
           << ',' << s.cells << '\n';
    return os.str();
}

double ExperimentTable::mean_accuracy(const std::string& method, double target) const {
    for (const auto& s : summaries)
        if (s.method == method && s.target == target) return s.mean_accuracy;
    throw ConfigError("experiment: no summary for " + method);
}

void write_accuracy_svg(const ExperimentTable& table, const std::string& path) {
    const double width = 640, height = 420;
    const double ml = 70, mr = 30, mt = 30, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::vector<std::string> methods;
    for (const auto& s : table.summaries)
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end())
            methods.push_back(s.method);

    double lo = 1.0, hi = 0.0;
    for (const auto& s : table.summaries) {
        lo = std::min(lo, s.mean_accuracy);
        hi = std::max(hi, s.mean_accuracy);
    }
    if (hi <= lo) hi = lo + 0.01;
    lo = std::max(0.0, lo - 0.02);
    hi = std::min(1.0, hi + 0.02);

    auto xpos = [&](double ratio) { return ml + pw * ratio; };
    auto ypos = [&](double acc) { return mt + ph * (1.0 - (acc - lo) / (hi - lo)); };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
    for (int g = 0; g <= 4; ++g) {
        const double acc = lo + (hi - lo) * g / 4.0;
        f << "<text x=\"" << ml - 8 << "\" y=\"" << ypos(acc) + 4
          << "\" font-size=\"11\" text-anchor=\"end\">" << static_cast<int>(acc * 1000) / 10.0
          << "%</text>\n";
        const double r = g / 4.0;
        f << "<text x=\"" << xpos(r) << "\" y=\"" << mt + ph + 18
          << "\" font-size=\"11\" text-anchor=\"middle\">" << static_cast<int>(r * 100)
          << "%</text>\n";
    }
    f << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
      << "\" font-size=\"12\" text-anchor=\"middle\">remaining neurons (%)</text>\n";
    f << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
      << ")\">accuracy</text>\n";

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : table.summaries)
            if (s.method == methods[mi] && s.cells > 0)
                pts.emplace_back(s.target, s.mean_accuracy);
        std::sort(pts.begin(), pts.end());
        if (pts.empty()) continue;
        f << "<polyline fill=\"none\" stroke=\"" << kColors[mi % 8] << "\" stroke-width=\"2\" points=\"";
        for (const auto& [r, a] : pts) f << xpos(r) << ',' << ypos(a) << ' ';
        f << "\"/>\n";
        for (const auto& [r, a] : pts)
            f << "<circle cx=\"" << xpos(r) << "\" cy=\"" << ypos(a) << "\" r=\"3\" fill=\""
              << kColors[mi % 8] << "\"/>\n";
        f << "<text x=\"" << ml + pw - 4 << "\" y=\"" << mt + 16 + 16 * double(mi)
          << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << kColors[mi % 8] << "\">"
          << methods[mi] << "</text>\n";
    }
    f << "</svg>\n";
}

} // namespace tropnnc
