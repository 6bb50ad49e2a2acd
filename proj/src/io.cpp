#include "hgf/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "hgf/errors.hpp"

namespace hgf::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary) {
        if (!out_) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
    }
    template <class T>
    void put(T v) {
        v = to_little(v);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void doubles(std::span<const double> xs) {
        if constexpr (std::endian::native == std::endian::little)
            bytes(reinterpret_cast<const char*>(xs.data()), xs.size() * sizeof(double));
        else
            for (double x : xs) put(x);
    }
    void finish(const std::filesystem::path& p) {
        out_.flush();
        if (!out_) throw Error(ErrorKind::Io, "write to " + p.string() + " failed");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary), path_(p) {
        if (!in_) throw Error(ErrorKind::Io, "cannot open " + p.string());
    }
    template <class T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        check();
        return to_little(v);
    }
    void bytes(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        check();
    }
    void doubles(std::span<double> xs) {
        bytes(reinterpret_cast<char*>(xs.data()), xs.size() * sizeof(double));
        if constexpr (std::endian::native != std::endian::little)
            for (double& x : xs) x = to_little(x);
    }

private:
    void check() {
        if (!in_) throw Error(ErrorKind::Io, "truncated snapshot " + path_.string());
    }
    std::ifstream in_;
    std::filesystem::path path_;
};

void put_field(Writer& w, const std::string& name, const Field& f) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(f.rank()));
    w.put<std::uint32_t>(f.upper_mask());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.doubles(f.values());
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    const ChartGrid& g = s.g.g.grid();
    Writer w(path);
    w.bytes(kSnapshotTag, sizeof kSnapshotTag);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < 3; ++a) w.put<std::uint32_t>(static_cast<std::uint32_t>(g.shape()[a]));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.mode()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.margin()));
    for (int a = 0; a < 3; ++a) w.put<double>(g.spacing()[a]);
    for (int a = 0; a < 3; ++a) w.put<double>(g.origin()[a]);
    w.put<double>(s.t);
    w.put<std::int64_t>(s.step);
    w.put<std::uint32_t>(s.curvature ? 4u : 2u);
    put_field(w, "g", s.g.g);
    put_field(w, "h", s.h.h);
    if (s.curvature) {
        put_field(w, "ricci", s.curvature->ricci);
        put_field(w, "scalar", s.curvature->scalar);
    }
    w.finish(path);
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
    Reader r(path);
    char tag[sizeof kSnapshotTag];
    r.bytes(tag, sizeof tag);
    if (std::memcmp(tag, kSnapshotTag, sizeof tag) != 0)
        throw Error(ErrorKind::Io, path.string() + " is not a snapshot file (bad format tag)");
    const int dim = static_cast<int>(r.get<std::uint32_t>());
    std::vector<int> shape(3);
    for (int& n : shape) n = static_cast<int>(r.get<std::uint32_t>());
    const auto mode = static_cast<BoundaryMode>(r.get<std::uint32_t>());
    const int margin = static_cast<int>(r.get<std::uint32_t>());
    std::vector<double> spacing(3), origin(3);
    for (double& h : spacing) h = r.get<double>();
    for (double& o : origin) o = r.get<double>();
    SnapshotFile out;
    shape.resize(dim);
    spacing.resize(dim);
    origin.resize(dim);
    out.grid = build_grid(dim, shape, spacing, mode, margin, origin);
    out.t = r.get<double>();
    out.step = static_cast<long>(r.get<std::int64_t>());
    const std::uint32_t count = r.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < count; ++k) {
        const int rank = static_cast<int>(r.get<std::uint32_t>());
        const std::uint32_t mask = r.get<std::uint32_t>();
        std::string name(r.get<std::uint32_t>(), '\0');
        r.bytes(name.data(), name.size());
        Field f(out.grid, rank, mask);
        r.doubles(f.values());
        out.fields.emplace_back(std::move(name), std::move(f));
    }
    return out;
}

std::string format_double(double v) { return nlohmann::json(v).dump(); }

void write_series(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& xy) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    for (const auto& [x, y] : xy) out << format_double(x) << ' ' << format_double(y) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

NdjsonWriter::NdjsonWriter(const std::filesystem::path& path) : out_(std::make_unique<std::ofstream>(path)) {
    if (!*out_) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
}

NdjsonWriter::~NdjsonWriter() = default;

void NdjsonWriter::write(const std::string& json_object) {
    *out_ << json_object << '\n';
    if (!*out_) throw Error(ErrorKind::Io, "ndjson write failed");
}

std::string to_json(const ReportEntry& e) {
    nlohmann::json j;
    j["id"] = e.id;
    j["status"] = std::string(to_string(e.status));
    j["order"] = e.order.available ? nlohmann::json(e.order.order) : nlohmann::json(nullptr);
    j["saturated"] = e.order.saturated;
    j["order_threshold"] = e.order_threshold;
    j["tolerance"] = e.tolerance;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : e.series.entries) rows.push_back({{"dx", r.dx}, {"dt", r.dt}, {"max", r.max_norm}, {"rms", r.rms}});
    j["series"] = rows;
    if (!e.notes.empty()) j["notes"] = e.notes;
    return j.dump();
}

void write_report(const std::filesystem::path& dir, const VerificationReport& r) {
    std::filesystem::create_directories(dir / "series");
    NdjsonWriter nd(dir / "report.ndjson");
    for (const auto& e : r.entries) {
        nd.write(to_json(e));
        std::vector<std::pair<double, double>> xy;
        for (const auto& row : e.series.entries) xy.emplace_back(row.dx, row.max_norm);
        std::string name = e.id;
        for (char& c : name)
            if (c == '@' || c == '=' || c == '/') c = '_';
        write_series(dir / "series" / (name + ".dat"), xy);
    }
}

}  // namespace hgf::io
