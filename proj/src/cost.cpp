#include "wb/cost.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

namespace wb {

namespace {

const std::vector<std::string>& op_order() {
    static const std::vector<std::string> order = {"Th", "Tecc", "Ted",  "Taed", "Tx",
                                                   "Tfe", "Tp",  "Tme", "Ta",   "Tm"};
    return order;
}

bool known_op(const std::string& op) {
    const auto& order = op_order();
    return std::find(order.begin(), order.end(), op) != order.end();
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(const std::string& what) {
    throw WbError("cost-parse-error", what);
}

std::string render_term(const OpTerm& t) {
    std::string out;
    if (t.coeff_z != 0) {
        out += "(";
        out += std::to_string(t.coeff_z) + "z";
        if (t.coeff_const != 0) out += "+" + std::to_string(t.coeff_const);
        out += ")";
    } else {
        out += std::to_string(t.coeff_const);
    }
    return out + t.op;
}

OpTerm parse_term(const std::string& text) {
    OpTerm t;
    std::size_t pos = 0;
    if (!text.empty() && text[0] == '(') {
        std::size_t close = text.find(')');
        if (close == std::string::npos) parse_fail("unclosed parenthesis in " + text);
        std::string inner = text.substr(1, close - 1);
        std::size_t zpos = inner.find('z');
        if (zpos == std::string::npos) parse_fail("parametric term without z: " + text);
        t.coeff_z = std::stol(inner.substr(0, zpos));
        std::string rest = inner.substr(zpos + 1);
        if (!rest.empty()) {
            if (rest[0] != '+') parse_fail("expected + after z coefficient: " + text);
            t.coeff_const = std::stol(rest.substr(1));
        }
        pos = close + 1;
    } else {
        std::size_t digits = 0;
        while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits])))
            ++digits;
        if (digits == 0) parse_fail("op term without a count: " + text);
        t.coeff_const = std::stol(text.substr(0, digits));
        pos = digits;
    }
    t.op = text.substr(pos);
    if (!known_op(t.op)) parse_fail("unknown op mnemonic: " + t.op);
    return t;
}

}  // namespace

double CostRow::time_ms() const {
    if (!time_present) throw WbError("cost-absent", protocol_id + " reports no time");
    return std::stod(time_text);
}

const CostRow* CostTable::find(const std::string& protocol_id) const {
    for (const auto& r : rows)
        if (r.protocol_id == protocol_id) return &r;
    return nullptr;
}

CostTable builtin_cost_table() {
    CostTable t;
    auto row = [&](const std::string& id) -> CostRow& {
        t.rows.push_back({});
        t.rows.back().protocol_id = id;
        return t.rows.back();
    };
    auto ops = [](CostRow& r, std::vector<OpTerm> terms) { r.computation = std::move(terms); };
    auto comm = [](CostRow& r, long bits, bool est = false) {
        r.comm_present = true;
        r.comm_bits = bits;
        r.comm_estimated = est;
    };
    auto rounds = [](CostRow& r, int n) {
        r.rounds_present = true;
        r.rounds = n;
    };
    auto time = [](CostRow& r, const std::string& text, bool est = false) {
        r.time_present = true;
        r.time_text = text;
        r.time_estimated = est;
    };

    {
        CostRow& r = row("p1wofs");
        ops(r, {{"Th", 326, 0}, {"Taed", 1, 0}});
        comm(r, 3992);
        rounds(r, 2);
        time(r, "22.39");
    }
    {
        CostRow& r = row("p1fs");
        ops(r, {{"Th", 328, 0}, {"Tecc", 4, 0}, {"Taed", 1, 0}});
        comm(r, 4748);
        rounds(r, 3);
        time(r, "115.549", true);
    }
    {
        CostRow& r = row("p2");
        ops(r, {{"Th", 18, 0}, {"Tx", 14, 0}, {"Tfe", 2, 0}, {"Tecc", 2, 0}});
        comm(r, 1024);
        rounds(r, 1);
        time(r, "198.21");
    }
    {
        CostRow& r = row("p3");
        ops(r, {{"Tme", 4, 0}, {"Tm", 3, 2}, {"Ta", 0, 2}, {"Th", 26, 2}});
        comm(r, 2720);
        rounds(r, 4);
        time(r, "11.28");
        r.storage = "3.4GB + 252B";
    }
    {
        CostRow& r = row("p4");
        ops(r, {{"Th", 26, 0}, {"Ted", 2, 0}});
        comm(r, 2000);
        rounds(r, 3);
    }
    {
        CostRow& r = row("p5");
        ops(r, {{"Th", 17, 0}});
        r.computation_estimated = true;
        comm(r, 1312, true);
        rounds(r, 3);
    }
    {
        CostRow& r = row("p6");
        ops(r, {{"Th", 15, 0}, {"Tfe", 1, 0}, {"Ted", 3, 0}});
        comm(r, 2144);
        rounds(r, 2);
        time(r, "8.9385");
    }
    {
        CostRow& r = row("p7");
        ops(r, {{"Th", 4, 0}, {"Tp", 2, 0}});
        comm(r, 640);
        rounds(r, 1);
        r.storage = "404 GB";
    }
    {
        CostRow& r = row("p8");
        ops(r, {{"Th", 5, 0}, {"Tecc", 2, 0}, {"Ted", 8, 0}});
        comm(r, 1600);
        rounds(r, 3);
        time(r, "80.6");
        r.storage = "480 bits";
    }
    {
        CostRow& r = row("p9");
        ops(r, {{"Tme", 1, 0}, {"Th", 7, 0}});
        comm(r, 448, true);
        rounds(r, 1);
    }
    {
        CostRow& r = row("p10");
        ops(r, {{"Th", 10, 0}, {"Tx", 10, 0}, {"Tfe", 1, 0}});
        comm(r, 896);
        rounds(r, 2);
    }
    return t;
}

CostTable parse_cost_table(const std::string& text) {
    CostTable t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '|')) cols.push_back(trim(col));
        if (cols.size() != 6) parse_fail("expected 6 columns: " + line);

        CostRow r;
        r.protocol_id = cols[0];

        std::string counts = cols[1];
        if (!counts.empty() && counts.back() == '#') {
            r.computation_estimated = true;
            counts.pop_back();
        }
        std::string term;
        std::stringstream cs(counts);
        while (std::getline(cs, term, '+')) {
            // Re-join pieces split inside a parenthesised coefficient.
            while (term.find('(') != std::string::npos &&
                   term.find(')') == std::string::npos) {
                std::string more;
                if (!std::getline(cs, more, '+')) parse_fail("unclosed parenthesis: " + line);
                term += "+" + more;
            }
            r.computation.push_back(parse_term(trim(term)));
        }
        if (r.computation.empty()) parse_fail("empty op count: " + line);

        if (cols[2] != "-") {
            r.comm_present = true;
            std::string bits = cols[2];
            if (!bits.empty() && bits.back() == '*') {
                r.comm_estimated = true;
                bits.pop_back();
            }
            r.comm_bits = std::stol(bits);
        }
        if (cols[3] != "-") {
            r.rounds_present = true;
            r.rounds = std::stoi(cols[3]);
        }
        if (cols[4] != "-") {
            r.time_present = true;
            r.time_text = cols[4];
            if (!r.time_text.empty() && r.time_text.back() == '#') {
                r.time_estimated = true;
                r.time_text.pop_back();
            }
        }
        if (cols[5] != "-") r.storage = cols[5];
        t.rows.push_back(std::move(r));
    }
    return t;
}

CostTable load_cost_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WbError("cost-file-missing", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cost_table(buf.str());
}

std::string render_cost_table(const CostTable& table) {
    std::ostringstream out;
    for (const auto& r : table.rows) {
        out << r.protocol_id << " | ";
        for (std::size_t i = 0; i < r.computation.size(); ++i) {
            if (i) out << "+";
            out << render_term(r.computation[i]);
        }
        if (r.computation_estimated) out << "#";
        out << " | ";
        if (r.comm_present)
            out << r.comm_bits << (r.comm_estimated ? "*" : "");
        else
            out << "-";
        out << " | ";
        if (r.rounds_present)
            out << r.rounds;
        else
            out << "-";
        out << " | ";
        if (r.time_present)
            out << r.time_text << (r.time_estimated ? "#" : "");
        else
            out << "-";
        out << " | ";
        out << (r.storage.empty() ? "-" : r.storage) << "\n";
    }
    return out.str();
}

std::string render_cost_markdown(const CostTable& table) {
    std::ostringstream out;
    out << "| Protocol | Computation | Bits | Rounds | Time (ms) | Storage |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& line : [&] {
             std::vector<std::string> rows;
             std::istringstream in(render_cost_table(table));
             std::string l;
             while (std::getline(in, l)) rows.push_back(l);
             return rows;
         }())
        out << "| " << line << " |\n";
    std::string s = out.str();
    // The reference format already uses " | " separators inside each line.
    return s;
}

std::map<std::string, long> expand_counts(const CostRow& row, int z) {
    std::map<std::string, long> out;
    for (const auto& t : row.computation) out[t.op] += t.coeff_const + t.coeff_z * z;
    return out;
}

UnitTable parse_units(const std::string& text) {
    UnitTable units;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string op;
        double ms = 0;
        if (!(ls >> op >> ms)) parse_fail("unit line needs op and ms: " + line);
        if (!known_op(op)) parse_fail("unknown op mnemonic: " + op);
        if (ms < 0) parse_fail("negative unit: " + line);
        units[op] = ms;
    }
    return units;
}

UnitTable load_units(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WbError("units-file-missing", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_units(buf.str());
}

double estimate_time(const CostRow& row, const UnitTable& units, int z) {
    double total = 0;
    for (const auto& [op, count] : expand_counts(row, z)) {
        auto it = units.find(op);
        if (it == units.end()) throw WbError("unit-missing", op);
        total += static_cast<double>(count) * it->second;
    }
    return total;
}

UnitTable measure_primitives(const SuiteParams& suite, std::size_t trials) {
    if (trials < 16) throw WbError("too-few-trials", "measurement needs at least 16 trials");
    Rng rng(0xC0511E5ULL);
    Bytes block = rng.bytes(64);
    Bytes key = rng.bytes(suite.key_len);
    Bytes reading = rng.bytes(suite.fuzzy_bits / 8);
    FuzzyPair pair = fuzzy_gen(reading, suite, rng);
    PufDevice puf(rng.bytes(32));
    Bytes challenge = rng.bytes(32);
    std::uint64_t a = rng.below(suite.modulus), b = rng.below(suite.modulus);

    auto median_ms = [&](auto&& body) {
        std::vector<double> samples;
        samples.reserve(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            body();
            auto t1 = std::chrono::steady_clock::now();
            samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
        return samples[samples.size() / 2];
    };

    std::uint64_t sink = 0;
    UnitTable units;
    units["Th"] = median_ms([&] { sink += hash_raw(block, suite.digest_len)[0]; });
    units["Ted"] = median_ms([&] {
        Bytes ct = sym_encrypt(key, block, suite);
        sink += sym_decrypt(key, ct, suite)[0];
    });
    units["Taed"] = median_ms([&] {
        Bytes ct = sym_encrypt(key, block, suite);
        sink += ct[0];
    });
    units["Tx"] = median_ms([&] { sink += xor_bytes(block, block)[0] + 1; });
    units["Tfe"] = median_ms([&] { sink += fuzzy_rep(reading, pair.tau, suite)[0]; });
    units["Tp"] = median_ms([&] { sink += puf.response(challenge, suite)[0]; });
    units["Tme"] = median_ms([&] { sink += pow_mod(a, b, suite); });
    units["Ta"] = median_ms([&] { sink += add_mod(a, b, suite); });
    units["Tm"] = median_ms([&] { sink += mul_mod(a, b, suite); });
    // No curve arithmetic is linked; a scalar multiplication is stood in for
    // by a batch of field exponentiations of comparable work.
    units["Tecc"] = median_ms([&] {
        for (int i = 0; i < 8; ++i) sink += pow_mod(a + static_cast<std::uint64_t>(i), b, suite);
    });
    volatile std::uint64_t keep = sink;  // the timed bodies must not be elided
    (void)keep;
    return units;
}

const std::map<std::string, std::string>& op_descriptions() {
    static const std::map<std::string, std::string> d = {
        {"Th", "one-way digest"},
        {"Tecc", "curve scalar multiplication"},
        {"Ted", "symmetric encrypt or decrypt"},
        {"Taed", "authenticated encryption pass"},
        {"Tx", "bitwise masking"},
        {"Tfe", "fuzzy extraction"},
        {"Tp", "physical-function evaluation"},
        {"Tme", "modular exponentiation"},
        {"Ta", "modular addition"},
        {"Tm", "modular multiplication"},
    };
    return d;
}

}  // namespace wb
