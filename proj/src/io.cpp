#include "logcc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace logcc::io {

namespace {

struct Line {
    std::string_view text;
    std::size_t number;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> out;
    std::size_t start = 0, n = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(start, end - start);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        out.push_back({l, n++});
        start = end + 1;
    }
    return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

// comma separated fields with their 1-based columns
std::vector<std::pair<std::string_view, std::size_t>> fields(std::string_view s)
{
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = std::min(s.find(',', start), s.size());
        std::string_view f = s.substr(start, end - start);
        std::size_t col = start + 1;
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) {
            f.remove_prefix(1);
            ++col;
        }
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
        out.emplace_back(f, col);
        if (end == s.size()) break;
        start = end + 1;
    }
    return out;
}

// line and column of a byte offset
std::pair<std::size_t, std::size_t> position(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

[[noreturn]] void fail_at_key(std::string_view text, const std::string& key, const std::string& what)
{
    const std::size_t at = text.find("\"" + key + "\"");
    auto [l, c] = position(text, at == std::string_view::npos ? 0 : at);
    throw ParseError(what, l, c);
}

double json_value(const nlohmann::json& v)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf") return inf;
    throw PreconditionError("grid values must be numbers or \"inf\"");
}

Grid grid_from_json(const nlohmann::json& j)
{
    const int dim = j.at("dim").get<int>();
    const auto& bounds = j.at("bounds");
    const auto& shape = j.at("shape");
    if (dim < 1 || dim > 2 || bounds.size() != static_cast<std::size_t>(dim) || shape.size() != bounds.size())
        throw PreconditionError("dim, bounds and shape disagree");
    std::vector<Axis> axes;
    for (int k = 0; k < dim; ++k) {
        if (bounds[k].size() != 2) throw PreconditionError("each bound needs [lo, hi]");
        axes.push_back(Axis{bounds[k][0].get<double>(), bounds[k][1].get<double>(), shape[k].get<int>()});
    }
    return Grid(std::move(axes));
}

std::string extension(const std::string& path)
{
    const auto dot = path.rfind('.');
    return dot == std::string::npos ? std::string() : path.substr(dot);
}

}  // namespace

std::string format_double(double v)
{
    if (v == inf) return "inf";
    if (std::isnan(v) || v == -inf) throw PreconditionError("only finite values and +inf can be written");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t line, std::size_t column)
{
    if (s == "inf" || s == "+inf") return inf;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("expected a number, got '" + std::string(s) + "'", line, column);
    if (!std::isfinite(v)) throw ParseError("only finite values and inf are allowed", line, column);
    return v;
}

nlohmann::json to_json(const ExtendedGridFunction& f)
{
    const Grid& g = f.grid();
    nlohmann::json j;
    j["dim"] = g.dim();
    j["bounds"] = nlohmann::json::array();
    j["shape"] = nlohmann::json::array();
    for (int k = 0; k < g.dim(); ++k) {
        j["bounds"].push_back({g.axis(k).lo, g.axis(k).hi});
        j["shape"].push_back(g.points(k));
    }
    auto& v = j["values"] = nlohmann::json::array();
    for (double x : f.data()) {
        if (x == inf) v.push_back("inf");
        else v.push_back(x);
    }
    return j;
}

ExtendedGridFunction grid_function_from_value(const nlohmann::json& j)
{
    Grid g = grid_from_json(j);
    const auto& vals = j.at("values");
    if (vals.size() != g.size()) throw PreconditionError("values do not match the grid shape");
    std::vector<double> v;
    v.reserve(vals.size());
    for (const auto& x : vals) v.push_back(json_value(x));
    return ExtendedGridFunction(std::move(g), std::move(v));
}

ExtendedGridFunction grid_function_from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [l, c] = position(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError("malformed JSON", l, c);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", 1, 1);
    for (const char* key : {"dim", "bounds", "shape", "values"})
        if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"", 1, 1);
    try {
        return grid_function_from_value(j);
    } catch (const nlohmann::json::exception& e) {
        fail_at_key(text, "bounds", std::string("bad grid description: ") + e.what());
    } catch (const PreconditionError& e) {
        fail_at_key(text, "values", e.what());
    }
}

std::string to_csv(const ExtendedGridFunction& f)
{
    if (f.grid().dim() != 1) throw PreconditionError("CSV grid functions are 1D only");
    std::string out = "x,value\n";
    for (int i = 0; i < f.grid().points(0); ++i)
        out += format_double(f.grid().coord(0, i)) + "," + format_double(f[i]) + "\n";
    return out;
}

ExtendedGridFunction grid_function_from_csv(std::string_view text)
{
    std::vector<double> xs, vs;
    std::vector<std::size_t> rows;
    for (const Line& l : split_lines(text)) {
        if (blank(l.text) || l.text.front() == '#') continue;
        auto f = fields(l.text);
        if (xs.empty() && rows.empty() && f.size() == 2 && f[0].first == "x") {
            rows.push_back(0);
            continue;
        }
        if (f.size() != 2) throw ParseError("expected two columns x,value", l.number, 1);
        xs.push_back(parse_double(f[0].first, l.number, f[0].second));
        vs.push_back(parse_double(f[1].first, l.number, f[1].second));
        rows.push_back(l.number);
    }
    if (xs.size() < 3) throw ParseError("need at least three rows", 1, 1);
    if (rows.front() == 0) rows.erase(rows.begin());
    const Axis a{xs.front(), xs.back(), static_cast<int>(xs.size())};
    if (!(a.lo < a.hi)) throw ParseError("x must increase", rows.back(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - a.coord(static_cast<int>(i))) > 1e-9 * a.spacing())
            throw ParseError("x column is not uniformly spaced", rows[i], 1);
    return ExtendedGridFunction(Grid(std::vector<Axis>{a}), std::move(vs));
}

std::string to_csv(const DiscreteMeasure& m)
{
    std::string out = "# dim=" + std::to_string(m.dim()) + ",even=" + (m.even() ? "true" : "false") + "\n";
    out += m.dim() == 1 ? "x1,weight\n" : "x1,x2,weight\n";
    for (const Atom& a : m.atoms()) {
        out += format_double(a.x[0]) + ",";
        if (m.dim() == 2) out += format_double(a.x[1]) + ",";
        out += format_double(a.w) + "\n";
    }
    return out;
}

DiscreteMeasure measure_from_csv(std::string_view text)
{
    int dim = 0;
    bool even = false, header = false;
    std::vector<Atom> atoms;
    for (const Line& l : split_lines(text)) {
        if (blank(l.text)) continue;
        if (l.text.front() == '#') {
            if (header || !atoms.empty()) continue;
            header = true;
            for (auto [f, col] : fields(l.text.substr(1))) {
                while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
                const auto eq = f.find('=');
                if (eq == std::string_view::npos) throw ParseError("expected key=value", l.number, col + 1);
                const auto key = f.substr(0, eq), val = f.substr(eq + 1);
                if (key == "dim") {
                    if (val == "1") dim = 1;
                    else if (val == "2") dim = 2;
                    else throw ParseError("dim must be 1 or 2", l.number, col + 1 + eq + 1);
                } else if (key == "even") {
                    if (val == "true") even = true;
                    else if (val == "false") even = false;
                    else throw ParseError("even must be true or false", l.number, col + 1 + eq + 1);
                }
            }
            continue;
        }
        if (!header) throw ParseError("missing '# dim=..,even=..' header", l.number, 1);
        if (dim == 0) throw ParseError("header has no dim", l.number, 1);
        auto f = fields(l.text);
        if (f[0].first == "x1") continue;
        if (f.size() != static_cast<std::size_t>(dim + 1))
            throw ParseError("expected " + std::to_string(dim + 1) + " columns", l.number, 1);
        Atom a{Point{0.0, 0.0}, 0.0};
        for (int k = 0; k < dim; ++k) {
            a.x[k] = parse_double(f[k].first, l.number, f[k].second);
            if (a.x[k] == inf) throw ParseError("atom positions must be finite", l.number, f[k].second);
        }
        a.w = parse_double(f[dim].first, l.number, f[dim].second);
        if (!(a.w > 0.0) || a.w == inf) throw ParseError("weights must be finite and positive", l.number, f[dim].second);
        atoms.push_back(a);
    }
    if (!header) throw ParseError("missing '# dim=..,even=..' header", 1, 1);
    if (atoms.empty()) throw ParseError("measure has no atoms", 1, 1);
    return DiscreteMeasure(dim, std::move(atoms), even);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write " + path);
    out << text;
    if (!out) throw PreconditionError("write failed for " + path);
}

ExtendedGridFunction read_grid_function(const std::string& path)
{
    const std::string text = read_text(path);
    return extension(path) == ".csv" ? grid_function_from_csv(text) : grid_function_from_json(text);
}

void write_grid_function(const std::string& path, const ExtendedGridFunction& f)
{
    write_text(path, extension(path) == ".csv" ? to_csv(f) : to_json(f).dump() + "\n");
}

DiscreteMeasure read_measure(const std::string& path) { return measure_from_csv(read_text(path)); }

void write_measure(const std::string& path, const DiscreteMeasure& m) { write_text(path, to_csv(m)); }

}  // namespace logcc::io
