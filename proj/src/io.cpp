// SPDX-License-Identifier: Apache-2.0
//
// xlchan - near-field and spatially non-stationary THz XL-MIMO channel synthesis
// Copyright (C) 2026 The xlchan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "xlchan/io.hpp"
#include "xlchan/errors.hpp"

#include "json.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace xlchan
{
    using nlohmann::json;

    namespace
    {
        [[noreturn]] void fail(const std::string &where, const std::string &what)
        {
            throw config_error(where + ": " + what);
        }

        // ---- JSON helpers ----

        void check_keys(const json &j, const std::string &where, std::initializer_list<std::string_view> allowed)
        {
            if (!j.is_object())
                fail(where, "expected an object");
            for (const auto &item : j.items())
            {
                bool ok = false;
                for (auto a : allowed)
                    ok = ok || item.key() == a;
                if (!ok)
                    fail(where, "unknown key '" + item.key() + "'");
            }
        }

        double get_number(const json &j, const std::string &where)
        {
            if (!j.is_number())
                fail(where, "expected a number");
            return j.get<double>();
        }

        std::uint64_t get_unsigned(const json &j, const std::string &where)
        {
            if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
                fail(where, "expected a non-negative integer");
            return j.get<std::uint64_t>();
        }

        std::string get_string(const json &j, const std::string &where)
        {
            if (!j.is_string())
                fail(where, "expected a string");
            return j.get<std::string>();
        }

        bool get_bool(const json &j, const std::string &where)
        {
            if (!j.is_boolean())
                fail(where, "expected true or false");
            return j.get<bool>();
        }

        json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

        Vec3 get_vec(const json &j, const std::string &where)
        {
            if (!j.is_array() || j.size() != 3)
                fail(where, "expected an array of 3 numbers");
            return {get_number(j[0], where), get_number(j[1], where), get_number(j[2], where)};
        }

        Interval get_interval(const json &j, const std::string &where)
        {
            if (!j.is_array() || j.size() != 2)
                fail(where, "expected [low, high]");
            return {get_number(j[0], where), get_number(j[1], where)};
        }

        json pattern_json(const AntennaPattern &p)
        {
            if (p.kind() == AntennaPattern::Kind::omnidirectional)
                return {{"kind", "omnidirectional"}, {"gain_dbi", p.peak_gain_dbi()}};
            return {{"kind", "gaussian_lobe"},
                    {"boresight", vec_json(p.boresight())},
                    {"gain_dbi", p.peak_gain_dbi()},
                    {"hpbw_az", p.hpbw_az()},
                    {"hpbw_el", p.hpbw_el()}};
        }

        AntennaPattern get_pattern(const json &j, const std::string &where)
        {
            check_keys(j, where, {"kind", "boresight", "gain_dbi", "hpbw_az", "hpbw_el"});
            std::string kind = j.contains("kind") ? get_string(j["kind"], where + ".kind") : "omnidirectional";
            double gain = j.contains("gain_dbi") ? get_number(j["gain_dbi"], where + ".gain_dbi") : 0.0;
            if (kind == "omnidirectional")
            {
                for (auto k : {"boresight", "hpbw_az", "hpbw_el"})
                    if (j.contains(k))
                        fail(where, std::string("'") + k + "' is not used by an omnidirectional pattern");
                return AntennaPattern::omnidirectional(gain);
            }
            if (kind == "gaussian_lobe")
            {
                for (auto k : {"boresight", "hpbw_az", "hpbw_el"})
                    if (!j.contains(k))
                        fail(where, std::string("missing '") + k + "'");
                return AntennaPattern::gaussian_lobe(get_vec(j["boresight"], where + ".boresight"), gain,
                                                     get_number(j["hpbw_az"], where + ".hpbw_az"),
                                                     get_number(j["hpbw_el"], where + ".hpbw_el"));
            }
            fail(where + ".kind", "unknown pattern kind '" + kind + "'");
        }

        json grid_json(const FrequencyGrid &g)
        {
            return {{"f_low", g.f_low}, {"f_high", g.f_high}, {"num_points", g.num_points}};
        }

        FrequencyGrid get_grid(const json &j, const std::string &where)
        {
            check_keys(j, where, {"f_low", "f_high", "num_points"});
            FrequencyGrid g;
            if (j.contains("f_low"))
                g.f_low = get_number(j["f_low"], where + ".f_low");
            if (j.contains("f_high"))
                g.f_high = get_number(j["f_high"], where + ".f_high");
            if (j.contains("num_points"))
                g.num_points = get_unsigned(j["num_points"], where + ".num_points");
            return g;
        }

        json config_json(const ScenarioConfig &c, bool with_seed)
        {
            json j;
            j["format_version"] = format_version;
            j["name"] = c.name;
            j["array"] = {{"num_elements", c.array.num_elements},
                          {"spacing", c.array.spacing},
                          {"axis", vec_json(c.array.axis)},
                          {"reference_index", c.array.reference_index},
                          {"origin", vec_json(c.array.origin)}};
            j["grid"] = grid_json(c.grid);
            if (c.carrier_hz)
                j["carrier_hz"] = *c.carrier_hz;
            j["patterns"] = {{"tx", pattern_json(c.patterns.tx)}, {"rx", pattern_json(c.patterns.rx)}};
            j["receivers"] = json::array();
            for (const auto &r : c.receivers)
                j["receivers"].push_back(vec_json(r));
            j["include_los"] = c.include_los;
            j["los_stationarity"] = std::string(to_string(c.los_stationarity));
            j["reflectors"] = json::array();
            for (const auto &r : c.reflectors)
                j["reflectors"].push_back({{"name", r.name},
                                           {"point", vec_json(r.plane.point)},
                                           {"normal", vec_json(r.plane.normal)},
                                           {"loss_db", r.loss_db},
                                           {"phase", r.phase},
                                           {"stationarity", std::string(to_string(r.stationarity))}});
            j["scatterers"] = json::array();
            for (const auto &s : c.scatterers)
                j["scatterers"].push_back({{"name", s.name},
                                           {"position", vec_json(s.position)},
                                           {"loss_db", s.loss_db},
                                           {"phase", s.phase},
                                           {"stationarity", std::string(to_string(s.stationarity))}});
            const auto &a = c.aaf_stats;
            j["aaf_stats"] = {{"mu_p", a.mu_p},
                              {"sigma_p", a.sigma_p},
                              {"xi", a.xi},
                              {"gamma", a.gamma},
                              {"lambda_corr", a.lambda_corr},
                              {"p_range", json::array({a.p_range.low, a.p_range.high})},
                              {"dcorr_range", json::array({a.dcorr_range.low, a.dcorr_range.high})}};
            j["vr"] = {{"min_fraction", c.vr.min_fraction}, {"max_fraction", c.vr.max_fraction}};
            j["variant"] = std::string(to_string(c.variant));
            j["nlos_model"] = std::string(to_string(c.nlos_model));
            if (with_seed && c.seed)
                j["seed"] = *c.seed;
            return j;
        }

        ScenarioConfig parse_config(const json &j)
        {
            const std::string w = "config";
            check_keys(j, w, {"format_version", "name", "array", "grid", "carrier_hz", "patterns", "receivers",
                              "include_los", "los_stationarity", "reflectors", "scatterers", "aaf_stats", "vr",
                              "variant", "nlos_model", "seed"});
            if (!j.contains("format_version"))
                fail(w, "missing 'format_version'");
            if (get_unsigned(j["format_version"], w + ".format_version") != std::uint64_t(format_version))
                fail(w, "unsupported format_version");

            ScenarioConfig c;
            if (j.contains("name"))
                c.name = get_string(j["name"], w + ".name");
            if (j.contains("array"))
            {
                const json &a = j["array"];
                check_keys(a, w + ".array", {"num_elements", "spacing", "axis", "reference_index", "origin"});
                if (a.contains("num_elements"))
                    c.array.num_elements = get_unsigned(a["num_elements"], w + ".array.num_elements");
                if (a.contains("spacing"))
                    c.array.spacing = get_number(a["spacing"], w + ".array.spacing");
                if (a.contains("axis"))
                    c.array.axis = get_vec(a["axis"], w + ".array.axis");
                if (a.contains("reference_index"))
                    c.array.reference_index = get_unsigned(a["reference_index"], w + ".array.reference_index");
                if (a.contains("origin"))
                    c.array.origin = get_vec(a["origin"], w + ".array.origin");
            }
            if (j.contains("grid"))
                c.grid = get_grid(j["grid"], w + ".grid");
            if (j.contains("carrier_hz"))
                c.carrier_hz = get_number(j["carrier_hz"], w + ".carrier_hz");
            if (j.contains("patterns"))
            {
                const json &p = j["patterns"];
                check_keys(p, w + ".patterns", {"tx", "rx"});
                if (p.contains("tx"))
                    c.patterns.tx = get_pattern(p["tx"], w + ".patterns.tx");
                if (p.contains("rx"))
                    c.patterns.rx = get_pattern(p["rx"], w + ".patterns.rx");
            }
            if (j.contains("receivers"))
            {
                if (!j["receivers"].is_array())
                    fail(w + ".receivers", "expected an array");
                for (std::size_t i = 0; i < j["receivers"].size(); ++i)
                    c.receivers.push_back(get_vec(j["receivers"][i], w + ".receivers[" + std::to_string(i) + "]"));
            }
            if (j.contains("include_los"))
                c.include_los = get_bool(j["include_los"], w + ".include_los");
            if (j.contains("los_stationarity"))
                c.los_stationarity = stationarity_from_string(get_string(j["los_stationarity"], w + ".los_stationarity"));
            if (j.contains("reflectors"))
            {
                if (!j["reflectors"].is_array())
                    fail(w + ".reflectors", "expected an array");
                for (std::size_t i = 0; i < j["reflectors"].size(); ++i)
                {
                    const json &r = j["reflectors"][i];
                    std::string rw = w + ".reflectors[" + std::to_string(i) + "]";
                    check_keys(r, rw, {"name", "point", "normal", "loss_db", "phase", "stationarity"});
                    Reflector ref;
                    if (r.contains("name"))
                        ref.name = get_string(r["name"], rw + ".name");
                    if (!r.contains("point") || !r.contains("normal"))
                        fail(rw, "reflector needs 'point' and 'normal'");
                    ref.plane.point = get_vec(r["point"], rw + ".point");
                    ref.plane.normal = get_vec(r["normal"], rw + ".normal");
                    if (r.contains("loss_db"))
                        ref.loss_db = get_number(r["loss_db"], rw + ".loss_db");
                    if (r.contains("phase"))
                        ref.phase = get_number(r["phase"], rw + ".phase");
                    if (r.contains("stationarity"))
                        ref.stationarity = stationarity_from_string(get_string(r["stationarity"], rw + ".stationarity"));
                    c.reflectors.push_back(ref);
                }
            }
            if (j.contains("scatterers"))
            {
                if (!j["scatterers"].is_array())
                    fail(w + ".scatterers", "expected an array");
                for (std::size_t i = 0; i < j["scatterers"].size(); ++i)
                {
                    const json &s = j["scatterers"][i];
                    std::string sw = w + ".scatterers[" + std::to_string(i) + "]";
                    check_keys(s, sw, {"name", "position", "loss_db", "phase", "stationarity"});
                    Scatterer sc;
                    if (s.contains("name"))
                        sc.name = get_string(s["name"], sw + ".name");
                    if (!s.contains("position"))
                        fail(sw, "scatterer needs 'position'");
                    sc.position = get_vec(s["position"], sw + ".position");
                    if (s.contains("loss_db"))
                        sc.loss_db = get_number(s["loss_db"], sw + ".loss_db");
                    if (s.contains("phase"))
                        sc.phase = get_number(s["phase"], sw + ".phase");
                    if (s.contains("stationarity"))
                        sc.stationarity = stationarity_from_string(get_string(s["stationarity"], sw + ".stationarity"));
                    c.scatterers.push_back(sc);
                }
            }
            if (j.contains("aaf_stats"))
            {
                const json &a = j["aaf_stats"];
                std::string aw = w + ".aaf_stats";
                check_keys(a, aw, {"mu_p", "sigma_p", "xi", "gamma", "lambda_corr", "p_range", "dcorr_range"});
                auto &s = c.aaf_stats;
                if (a.contains("mu_p"))
                    s.mu_p = get_number(a["mu_p"], aw + ".mu_p");
                if (a.contains("sigma_p"))
                    s.sigma_p = get_number(a["sigma_p"], aw + ".sigma_p");
                if (a.contains("xi"))
                    s.xi = get_number(a["xi"], aw + ".xi");
                if (a.contains("gamma"))
                    s.gamma = get_number(a["gamma"], aw + ".gamma");
                if (a.contains("lambda_corr"))
                    s.lambda_corr = get_number(a["lambda_corr"], aw + ".lambda_corr");
                if (a.contains("p_range"))
                    s.p_range = get_interval(a["p_range"], aw + ".p_range");
                if (a.contains("dcorr_range"))
                    s.dcorr_range = get_interval(a["dcorr_range"], aw + ".dcorr_range");
            }
            if (j.contains("vr"))
            {
                const json &v = j["vr"];
                check_keys(v, w + ".vr", {"min_fraction", "max_fraction"});
                if (v.contains("min_fraction"))
                    c.vr.min_fraction = get_number(v["min_fraction"], w + ".vr.min_fraction");
                if (v.contains("max_fraction"))
                    c.vr.max_fraction = get_number(v["max_fraction"], w + ".vr.max_fraction");
            }
            if (j.contains("variant"))
                c.variant = model_variant_from_string(get_string(j["variant"], w + ".variant"));
            if (j.contains("nlos_model"))
                c.nlos_model = nlos_model_from_string(get_string(j["nlos_model"], w + ".nlos_model"));
            if (j.contains("seed"))
                c.seed = get_unsigned(j["seed"], w + ".seed");
            c.validate();
            return c;
        }

        // ---- text helpers ----

        double parse_double(std::string_view tok, const std::string &where)
        {
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
                fail(where, "cannot parse number '" + std::string(tok) + "'");
            return v;
        }

        std::uint64_t parse_unsigned(std::string_view tok, const std::string &where)
        {
            std::uint64_t v = 0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
                fail(where, "cannot parse integer '" + std::string(tok) + "'");
            return v;
        }

        std::vector<std::string_view> split_ws(std::string_view line)
        {
            std::vector<std::string_view> out;
            std::size_t i = 0;
            while (i < line.size())
            {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                    ++i;
                std::size_t b = i;
                while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
                    ++i;
                if (i > b)
                    out.push_back(line.substr(b, i - b));
            }
            return out;
        }

        std::vector<std::string_view> split_lines(std::string_view text)
        {
            std::vector<std::string_view> out;
            std::size_t b = 0;
            while (b <= text.size())
            {
                std::size_t e = text.find('\n', b);
                if (e == std::string_view::npos)
                {
                    if (b < text.size())
                        out.push_back(text.substr(b));
                    break;
                }
                out.push_back(text.substr(b, e - b));
                b = e + 1;
            }
            return out;
        }

        std::string channel_data_name(const std::filesystem::path &header)
        {
            std::filesystem::path p = header.filename();
            p.replace_extension(".bin");
            return p.string();
        }

        void put_le32(std::string &buf, float f)
        {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            for (int b = 0; b < 4; ++b)
                buf.push_back(char((u >> (8 * b)) & 0xffu));
        }

        float get_le32(const unsigned char *p)
        {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b)
                u |= std::uint32_t(p[b]) << (8 * b);
            float f;
            std::memcpy(&f, &u, 4);
            return f;
        }
    }

    // ---------------------------------------------------------------------------------------------

    std::string read_text(const std::filesystem::path &file)
    {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw config_error("cannot open '" + file.string() + "' for reading");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_text(const std::filesystem::path &file, std::string_view text)
    {
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out)
            throw config_error("cannot open '" + file.string() + "' for writing");
        out.write(text.data(), std::streamsize(text.size()));
        if (!out)
            throw config_error("write to '" + file.string() + "' failed");
    }

    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        std::array<char, 32> buf{};
        auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), res.ptr);
    }

    // ---------------------------------------------------------------------------------------------

    std::string config_to_json(const ScenarioConfig &config)
    {
        return config_json(config, true).dump(2) + "\n";
    }

    ScenarioConfig config_from_json(std::string_view text)
    {
        json j;
        try
        {
            j = json::parse(text.begin(), text.end());
        }
        catch (const json::exception &e)
        {
            throw config_error(std::string("config: malformed JSON: ") + e.what());
        }
        try
        {
            return parse_config(j);
        }
        catch (const json::exception &e)
        {
            throw config_error(std::string("config: ") + e.what());
        }
    }

    ScenarioConfig load_config(const std::filesystem::path &file)
    {
        return config_from_json(read_text(file));
    }

    void save_config(const ScenarioConfig &config, const std::filesystem::path &file)
    {
        write_text(file, config_to_json(config));
    }

    std::string config_hash(const ScenarioConfig &config)
    {
        // seed excluded: hash and seed are reported side by side
        std::string s = config_json(config, false).dump();
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char ch : s)
        {
            h ^= ch;
            h *= 1099511628211ull;
        }
        static const char *hex = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 15; i >= 0; --i, h >>= 4)
            out[std::size_t(i)] = hex[h & 0xf];
        return out;
    }

    // ---------------------------------------------------------------------------------------------

    std::string format_path_list(const PathSet &paths)
    {
        std::string s = "# xlchan path list\n";
        s += "# path <model> <stationarity> alpha phi tau d aod_az aod_el aoa_az aoa_el [aaf <M> s_1 .. s_M]\n";
        s += "format_version " + std::to_string(format_version) + "\n";
        s += "num_ues " + std::to_string(paths.ues.size()) + "\n";
        for (std::size_t n = 0; n < paths.ues.size(); ++n)
        {
            s += "ue " + std::to_string(n) + "\n";
            for (const auto &p : paths.ues[n])
            {
                s += "path ";
                s += to_string(p.model);
                s += ' ';
                s += to_string(p.stationarity);
                for (double v : {p.amplitude, p.phase, p.delay, p.distance, p.aod.azimuth, p.aod.elevation,
                                 p.aoa.azimuth, p.aoa.elevation})
                    s += ' ' + format_double(v);
                if (p.aaf_override)
                {
                    s += " aaf " + std::to_string(p.aaf_override->size());
                    for (double v : *p.aaf_override)
                        s += ' ' + format_double(v);
                }
                s += '\n';
            }
        }
        return s;
    }

    PathSet parse_path_list(std::string_view text)
    {
        PathSet ps;
        bool have_version = false;
        std::optional<std::size_t> num_ues;
        auto lines = split_lines(text);
        for (std::size_t li = 0; li < lines.size(); ++li)
        {
            const std::string where = "path list line " + std::to_string(li + 1);
            auto tok = split_ws(lines[li]);
            if (tok.empty() || tok[0].front() == '#')
                continue;
            if (tok[0] == "format_version")
            {
                if (tok.size() != 2 || parse_unsigned(tok[1], where) != std::uint64_t(format_version))
                    fail(where, "unsupported format_version");
                have_version = true;
                continue;
            }
            if (!have_version)
                fail(where, "expected 'format_version' before any record");
            if (tok[0] == "num_ues")
            {
                if (tok.size() != 2 || num_ues)
                    fail(where, "malformed or repeated num_ues record");
                num_ues = parse_unsigned(tok[1], where);
                continue;
            }
            if (!num_ues)
                fail(where, "expected 'num_ues' before any UE");
            if (tok[0] == "ue")
            {
                if (tok.size() != 2)
                    fail(where, "malformed ue record");
                if (parse_unsigned(tok[1], where) != ps.ues.size())
                    fail(where, "UE indices must be consecutive from 0");
                if (ps.ues.size() == *num_ues)
                    fail(where, "more UEs than declared by num_ues");
                ps.ues.emplace_back();
                continue;
            }
            if (tok[0] == "path")
            {
                if (ps.ues.empty())
                    fail(where, "path record before the first 'ue' record");
                if (tok.size() != 11 && tok.size() < 13)
                    fail(where, "path record needs 10 fields after 'path'");
                PathRecord p;
                try
                {
                    p.model = wavefront_model_from_string(tok[1]);
                    p.stationarity = stationarity_from_string(tok[2]);
                }
                catch (const config_error &e)
                {
                    fail(where, e.what());
                }
                p.amplitude = parse_double(tok[3], where);
                p.phase = parse_double(tok[4], where);
                p.delay = parse_double(tok[5], where);
                p.distance = parse_double(tok[6], where);
                p.aod = {parse_double(tok[7], where), parse_double(tok[8], where)};
                p.aoa = {parse_double(tok[9], where), parse_double(tok[10], where)};
                if (tok.size() > 11)
                {
                    if (tok[11] != "aaf")
                        fail(where, "unknown path field '" + std::string(tok[11]) + "'");
                    std::size_t m = parse_unsigned(tok[12], where);
                    if (tok.size() != 13 + m)
                        fail(where, "AAF row declares " + std::to_string(m) + " values but has " +
                                        std::to_string(tok.size() - 13));
                    std::vector<double> s(m);
                    for (std::size_t i = 0; i < m; ++i)
                        s[i] = parse_double(tok[13 + i], where);
                    p.aaf_override = std::move(s);
                }
                try
                {
                    validate(p);
                }
                catch (const config_error &e)
                {
                    fail(where, e.what());
                }
                ps.ues.back().push_back(std::move(p));
                continue;
            }
            fail(where, "unknown record tag '" + std::string(tok[0]) + "'");
        }
        if (!have_version)
            fail("path list", "missing format_version");
        if (!num_ues || ps.ues.size() != *num_ues)
            fail("path list", "number of UE blocks does not match num_ues");
        return ps;
    }

    PathSet load_path_list(const std::filesystem::path &file)
    {
        return parse_path_list(read_text(file));
    }

    void save_path_list(const PathSet &paths, const std::filesystem::path &file)
    {
        write_text(file, format_path_list(paths));
    }

    // ---------------------------------------------------------------------------------------------

    void save_channel(const ChannelTensor &channel, const std::filesystem::path &header_file)
    {
        const auto &meta = channel.meta;
        json h;
        h["format_version"] = format_version;
        h["dtype"] = "complex64-le";
        h["order"] = "ue,element,frequency";
        h["dims"] = json::array({channel.num_ues(), channel.num_elements(), channel.num_frequencies()});
        h["data_file"] = channel_data_name(header_file);
        h["grid"] = grid_json(meta.grid);
        h["seed"] = meta.seed;
        h["variant"] = std::string(to_string(meta.variant));
        h["config_hash"] = meta.config_hash;
        h["array"] = {{"num_elements", meta.num_elements},
                      {"spacing", meta.spacing},
                      {"reference_index", meta.reference_index}};
        write_text(header_file, h.dump(2) + "\n");

        std::string buf;
        buf.reserve(channel.values.size() * 8);
        for (const cplx &v : channel.values.data())
        {
            put_le32(buf, float(v.real()));
            put_le32(buf, float(v.imag()));
        }
        std::filesystem::path data = header_file;
        data.replace_extension(".bin");
        write_text(data, buf);
    }

    ChannelTensor load_channel(const std::filesystem::path &header_file)
    {
        const std::string w = "channel header '" + header_file.string() + "'";
        json h;
        try
        {
            h = json::parse(read_text(header_file));
        }
        catch (const json::exception &e)
        {
            fail(w, e.what());
        }
        check_keys(h, w, {"format_version", "dtype", "order", "dims", "data_file", "grid", "seed", "variant",
                          "config_hash", "array"});
        for (auto k : {"format_version", "dtype", "dims", "data_file", "grid", "seed", "variant", "array"})
            if (!h.contains(k))
                fail(w, std::string("missing '") + k + "'");
        if (get_unsigned(h["format_version"], w) != std::uint64_t(format_version))
            fail(w, "unsupported format_version");
        if (get_string(h["dtype"], w + ".dtype") != "complex64-le")
            fail(w, "unsupported dtype");
        const json &d = h["dims"];
        if (!d.is_array() || d.size() != 3)
            fail(w, "dims must hold 3 integers");
        std::size_t N = get_unsigned(d[0], w), M = get_unsigned(d[1], w), K = get_unsigned(d[2], w);

        ChannelTensor ch;
        ch.meta.grid = get_grid(h["grid"], w + ".grid");
        ch.meta.seed = get_unsigned(h["seed"], w + ".seed");
        ch.meta.variant = model_variant_from_string(get_string(h["variant"], w + ".variant"));
        if (h.contains("config_hash"))
            ch.meta.config_hash = get_string(h["config_hash"], w + ".config_hash");
        const json &a = h["array"];
        check_keys(a, w + ".array", {"num_elements", "spacing", "reference_index"});
        ch.meta.num_elements = get_unsigned(a.value("num_elements", json(M)), w + ".array.num_elements");
        ch.meta.spacing = get_number(a.value("spacing", json(0.0)), w + ".array.spacing");
        ch.meta.reference_index = get_unsigned(a.value("reference_index", json(0)), w + ".array.reference_index");
        if (ch.meta.num_elements != M || ch.meta.grid.num_points != K)
            fail(w, "dims disagree with array/grid metadata");

        std::filesystem::path data = header_file.parent_path() / get_string(h["data_file"], w + ".data_file");
        std::string buf = read_text(data);
        if (buf.size() != N * M * K * 8)
            fail(w, "data file holds " + std::to_string(buf.size()) + " bytes, expected " +
                        std::to_string(N * M * K * 8));
        ch.values = ComplexTensor3(N, M, K);
        auto out = ch.values.data();
        const auto *p = reinterpret_cast<const unsigned char *>(buf.data());
        for (std::size_t i = 0; i < out.size(); ++i, p += 8)
            out[i] = cplx(get_le32(p), get_le32(p + 4));
        return ch;
    }

    // ---------------------------------------------------------------------------------------------

    void save_csv(const CsvTable &table, const std::filesystem::path &file)
    {
        if (table.columns.size() != table.data.size())
            throw config_error("save_csv: column names and data disagree");
        std::size_t rows = 0;
        for (const auto &c : table.data)
            rows = std::max(rows, c.size());

        std::string s;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            s += (c ? "," : "") + table.columns[c];
        s += '\n';
        for (std::size_t r = 0; r < rows; ++r)
        {
            for (std::size_t c = 0; c < table.data.size(); ++c)
            {
                if (c)
                    s += ',';
                if (r < table.data[c].size())
                    s += format_double(table.data[c][r]);
            }
            s += '\n';
        }
        write_text(file, s);

        json meta;
        meta["format_version"] = format_version;
        meta["file"] = file.filename().string();
        meta["columns"] = table.columns;
        meta["rows"] = rows;
        for (const auto &[k, v] : table.meta)
            meta[k] = v;
        write_text(file.string() + ".json", meta.dump(2) + "\n");
    }

    CsvTable load_csv(const std::filesystem::path &file)
    {
        const std::string w = "csv '" + file.string() + "'";
        std::string text = read_text(file);
        auto lines = split_lines(text);
        if (lines.empty())
            fail(w, "empty file");
        CsvTable t;
        auto split = [](std::string_view line)
        {
            std::vector<std::string_view> out;
            std::size_t b = 0;
            while (true)
            {
                std::size_t e = line.find(',', b);
                out.push_back(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
                if (e == std::string_view::npos)
                    break;
                b = e + 1;
            }
            return out;
        };
        std::string_view head = lines[0];
        if (!head.empty() && head.back() == '\r')
            head.remove_suffix(1);
        for (auto c : split(head))
            t.columns.emplace_back(c);
        t.data.resize(t.columns.size());
        for (std::size_t li = 1; li < lines.size(); ++li)
        {
            std::string_view line = lines[li];
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            if (line.empty())
                continue;
            auto cells = split(line);
            if (cells.size() != t.columns.size())
                fail(w + " line " + std::to_string(li + 1), "wrong number of cells");
            for (std::size_t c = 0; c < cells.size(); ++c)
            {
                if (cells[c].empty())
                    continue;
                double v;
                if (cells[c] == "nan")
                    v = std::numeric_limits<double>::quiet_NaN();
                else if (cells[c] == "inf")
                    v = std::numeric_limits<double>::infinity();
                else if (cells[c] == "-inf")
                    v = -std::numeric_limits<double>::infinity();
                else
                    v = parse_double(cells[c], w + " line " + std::to_string(li + 1));
                t.data[c].push_back(v);
            }
        }
        return t;
    }

    // ---------------------------------------------------------------------------------------------

    void save_run(const std::filesystem::path &dir, const ScenarioConfig &config, const PathSet &paths,
                  const SynthesisResult &result)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw config_error("cannot create output directory '" + dir.string() + "': " + ec.message());

        save_config(config, dir / "config.json");
        save_path_list(paths, dir / "paths.txt");
        save_channel(result.channel, dir / "channel.json");

        CsvTable aaf;
        aaf.columns = {"ue", "element", "path", "aaf"};
        aaf.data.resize(4);
        for (std::size_t n = 0; n < result.aaf.size(); ++n)
        {
            const auto &S = result.aaf[n];
            for (Eigen::Index l = 0; l < S.cols(); ++l)
                for (Eigen::Index m = 0; m < S.rows(); ++m)
                {
                    aaf.data[0].push_back(double(n));
                    aaf.data[1].push_back(double(m));
                    aaf.data[2].push_back(double(l));
                    aaf.data[3].push_back(S(m, l));
                }
        }
        aaf.meta = {{"seed", std::to_string(result.channel.meta.seed)},
                    {"variant", std::string(to_string(result.channel.meta.variant))},
                    {"config_hash", result.channel.meta.config_hash}};
        save_csv(aaf, dir / "aaf.csv");
    }

    RunData load_run(const std::filesystem::path &dir, std::string label)
    {
        ScenarioConfig config = load_config(dir / "config.json");
        PathSet paths = load_path_list(dir / "paths.txt");
        SynthesisResult res;
        res.channel = load_channel(dir / "channel.json");
        if (res.channel.num_ues() != paths.ues.size())
            throw config_error("run '" + dir.string() + "': channel and path list disagree on the number of UEs");

        CsvTable aaf = load_csv(dir / "aaf.csv");
        if (aaf.columns != std::vector<std::string>{"ue", "element", "path", "aaf"})
            throw config_error("run '" + dir.string() + "': unexpected aaf.csv columns");
        const ArrayGeometry geom = config.array.geometry();
        const std::size_t M = geom.size();
        for (const auto &ue : paths.ues)
            res.aaf.push_back(AAFMatrix::Ones(Eigen::Index(M), Eigen::Index(ue.size())));
        for (std::size_t r = 0; r < aaf.data[0].size(); ++r)
        {
            std::size_t n = std::size_t(aaf.data[0][r]), m = std::size_t(aaf.data[1][r]),
                        l = std::size_t(aaf.data[2][r]);
            if (n >= res.aaf.size() || m >= M || l >= paths.ues[n].size())
                throw config_error("run '" + dir.string() + "': aaf.csv index out of range");
            res.aaf[n](Eigen::Index(m), Eigen::Index(l)) = aaf.data[3][r];
        }
        for (std::size_t n = 0; n < paths.ues.size(); ++n)
        {
            auto vp = apply_variant_wavefront(paths.ues[n], config.variant);
            res.paths.push_back(path_domain(vp, geom, config.patterns, res.aaf[n], config.carrier()));
        }
        return make_run_data(std::move(label), res, paths);
    }
}
