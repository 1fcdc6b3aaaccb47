#include "shw/protocol.hpp"

#include "shw/errors.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace shw {

namespace {

class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void vec3(const Vec3& v) {
        for (int i = 0; i < 3; ++i) f64(v[i]);
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t>& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    bool ok() const { return ok_; }
    bool done() const { return ok_ && pos_ == in_.size(); }
    std::size_t remaining() const { return in_.size() - pos_; }

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4))); }
    double f64() { return std::bit_cast<double>(get(8)); }
    Vec3 vec3() {
        Vec3 v;
        for (int i = 0; i < 3; ++i) v[i] = f64();
        return v;
    }
    bool magic() {
        for (auto m : wire::kMagic)
            if (u8() != m) ok_ = false;
        return ok_;
    }

private:
    std::uint64_t get(int n) {
        if (!ok_ || remaining() < static_cast<std::size_t>(n)) {
            ok_ = false;
            return 0;
        }
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    bool ok_ = true;
};

void header(Writer& w, wire::PacketType type) {
    w.bytes(wire::kMagic);
    w.u8(static_cast<std::uint8_t>(type));
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

namespace wire {

GripPose CommandPacket::pose() const {
    return {Vec3(position[0], position[1], position[2]), Quat(quaternion[0], quaternion[1], quaternion[2], quaternion[3])};
}

CommandPacket CommandPacket::from_pose(std::uint32_t sequence, const GripPose& pose, bool trigger) {
    CommandPacket p;
    p.sequence = sequence;
    p.position = {pose.position().x(), pose.position().y(), pose.position().z()};
    const Quat& q = pose.orientation();
    p.quaternion = {q.w(), q.x(), q.y(), q.z()};
    p.trigger = trigger ? 1 : 0;
    return p;
}

StatePacket StatePacket::from_frame(const HapticFrame& f) {
    StatePacket p;
    p.tick = f.tick;
    p.sim_time = f.sim_time;
    const Vec3& x = f.pose.position();
    const Quat& q = f.pose.orientation();
    p.pose = {x.x(), x.y(), x.z(), q.w(), q.x(), q.y(), q.z()};
    for (int i = 0; i < 6; ++i) p.wrench[i] = f.wrench[i];
    for (int i = 0; i < 8; ++i) p.tensions[i] = f.tensions[i];
    p.status = f.solver_ran ? static_cast<std::uint8_t>(f.status) : kStatusNotRun;
    p.trigger = f.trigger ? 1 : 0;
    const std::size_t nc = std::min<std::size_t>(f.contacts.size(), 255);
    for (std::size_t i = 0; i < nc; ++i) {
        const Contact& c = f.contacts[i];
        p.contacts.push_back({{static_cast<float>(c.point.x()), static_cast<float>(c.point.y()),
                               static_cast<float>(c.point.z())},
                              {static_cast<float>(c.normal.x()), static_cast<float>(c.normal.y()),
                               static_cast<float>(c.normal.z())},
                              static_cast<float>(c.depth)});
    }
    const std::size_t nb = std::min<std::size_t>(f.bead_delta.size(), 65535);
    for (std::size_t i = 0; i < nb; ++i) {
        const Vec3& s = f.bead_delta[i].position;
        p.bead_delta.push_back({static_cast<float>(s.x()), static_cast<float>(s.y()), static_cast<float>(s.z())});
    }
    return p;
}

std::vector<std::uint8_t> encode(const CommandPacket& p) {
    std::vector<std::uint8_t> out;
    out.reserve(CommandPacket::kSize);
    Writer w(out);
    header(w, PacketType::Command);
    w.u32(p.sequence);
    for (double v : p.position) w.f64(v);
    for (double v : p.quaternion) w.f64(v);
    w.u8(p.trigger);
    return out;
}

std::vector<std::uint8_t> encode(const StatePacket& p) {
    if (p.contacts.size() > 255) throw InvalidInput("state packet: more than 255 contacts");
    if (p.bead_delta.size() > 65535) throw InvalidInput("state packet: more than 65535 bead samples");
    std::vector<std::uint8_t> out;
    out.reserve(4 + 1 + 8 + 8 + 21 * 8 + 3 + p.contacts.size() * 28 + 2 + p.bead_delta.size() * 12);
    Writer w(out);
    header(w, PacketType::State);
    w.u64(p.tick);
    w.f64(p.sim_time);
    for (double v : p.pose) w.f64(v);
    for (double v : p.wrench) w.f64(v);
    for (double v : p.tensions) w.f64(v);
    w.u8(p.status);
    w.u8(p.trigger);
    w.u8(static_cast<std::uint8_t>(p.contacts.size()));
    for (const auto& c : p.contacts) {
        for (float v : c.point) w.f32(v);
        for (float v : c.normal) w.f32(v);
        w.f32(c.depth);
    }
    w.u16(static_cast<std::uint16_t>(p.bead_delta.size()));
    for (const auto& s : p.bead_delta)
        for (float v : s) w.f32(v);
    return out;
}

std::vector<std::uint8_t> encode_subscribe() {
    std::vector<std::uint8_t> out;
    Writer w(out);
    header(w, PacketType::Subscribe);
    return out;
}

std::optional<PacketType> peek_type(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (!r.magic()) return std::nullopt;
    const std::uint8_t t = r.u8();
    if (!r.ok() || t < 1 || t > 3) return std::nullopt;
    return static_cast<PacketType>(t);
}

std::optional<CommandPacket> decode_command(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != CommandPacket::kSize) return std::nullopt;
    Reader r(bytes);
    if (!r.magic() || r.u8() != static_cast<std::uint8_t>(PacketType::Command)) return std::nullopt;
    CommandPacket p;
    p.sequence = r.u32();
    for (double& v : p.position) v = r.f64();
    for (double& v : p.quaternion) v = r.f64();
    p.trigger = r.u8();
    if (!r.done() || p.trigger > 1) return std::nullopt;
    if (!all_finite(p.position) || !all_finite(p.quaternion)) return std::nullopt;
    const double n2 = p.quaternion[0] * p.quaternion[0] + p.quaternion[1] * p.quaternion[1] +
                      p.quaternion[2] * p.quaternion[2] + p.quaternion[3] * p.quaternion[3];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) return std::nullopt;
    return p;
}

std::optional<StatePacket> decode_state(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (!r.magic() || r.u8() != static_cast<std::uint8_t>(PacketType::State)) return std::nullopt;
    StatePacket p;
    p.tick = r.u64();
    p.sim_time = r.f64();
    for (double& v : p.pose) v = r.f64();
    for (double& v : p.wrench) v = r.f64();
    for (double& v : p.tensions) v = r.f64();
    p.status = r.u8();
    p.trigger = r.u8();
    const std::size_t nc = r.u8();
    if (!r.ok() || r.remaining() < nc * 28) return std::nullopt;
    p.contacts.resize(nc);
    for (auto& c : p.contacts) {
        for (float& v : c.point) v = r.f32();
        for (float& v : c.normal) v = r.f32();
        c.depth = r.f32();
    }
    const std::size_t nb = r.u16();
    if (!r.ok() || r.remaining() != nb * 12) return std::nullopt;
    p.bead_delta.resize(nb);
    for (auto& s : p.bead_delta)
        for (float& v : s) v = r.f32();
    if (!r.done() || p.trigger > 1) return std::nullopt;
    if (p.status > 2 && p.status != kStatusNotRun) return std::nullopt;
    return p;
}

bool decode_subscribe(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    return r.magic() && r.u8() == static_cast<std::uint8_t>(PacketType::Subscribe) && r.done();
}

}  // namespace wire

namespace {

void write_contact(Writer& w, const Contact& c) {
    w.vec3(c.point);
    w.vec3(c.normal);
    w.f64(c.depth);
    w.u32(static_cast<std::uint32_t>(c.primitive));
    w.f64(c.time_of_impact);
}

Contact read_contact(Reader& r) {
    Contact c;
    c.point = r.vec3();
    c.normal = r.vec3();
    c.depth = r.f64();
    c.primitive = r.u32();
    c.time_of_impact = r.f64();
    return c;
}

}  // namespace

void FrameLog::append(const HapticFrame& f) {
    std::vector<std::uint8_t> rec;
    Writer w(rec);
    w.u64(f.tick);
    w.f64(f.sim_time);
    w.vec3(f.pose.position());
    const Quat& q = f.pose.orientation();
    for (double v : {q.w(), q.x(), q.y(), q.z()}) w.f64(v);
    for (int i = 0; i < 6; ++i) w.f64(f.velocity[i]);
    for (int i = 0; i < 6; ++i) w.f64(f.wrench[i]);
    for (int i = 0; i < 8; ++i) w.f64(f.tensions[i]);
    w.u8(static_cast<std::uint8_t>(f.status));
    w.u8(f.solver_ran ? 1 : 0);
    w.u8(f.scaled ? 1 : 0);
    w.f64(f.wrench_scale);
    w.u8(f.trigger ? 1 : 0);
    w.f64(f.junction_gap);
    w.u8(f.swept ? 1 : 0);
    if (f.swept) write_contact(w, *f.swept);
    w.u32(static_cast<std::uint32_t>(f.contacts.size()));
    for (const auto& c : f.contacts) write_contact(w, c);
    w.u32(static_cast<std::uint32_t>(f.bead_delta.size()));
    for (const auto& s : f.bead_delta) {
        w.vec3(s.position);
        w.f64(s.time);
    }
    Writer out(bytes_);
    out.u32(static_cast<std::uint32_t>(rec.size()));
    out.bytes(rec);
    ++records_;
}

std::vector<HapticFrame> FrameLog::parse(std::span<const std::uint8_t> bytes) {
    std::vector<HapticFrame> frames;
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        if (bytes.size() - offset < 4) throw ParseError("<frame log>", 0, "truncated record length");
        Reader len_reader(bytes.subspan(offset, 4));
        const std::uint32_t len = len_reader.u32();
        offset += 4;
        if (bytes.size() - offset < len) throw ParseError("<frame log>", 0, "truncated record");
        Reader r(bytes.subspan(offset, len));
        offset += len;

        HapticFrame f;
        f.tick = r.u64();
        f.sim_time = r.f64();
        const Vec3 p = r.vec3();
        const double qw = r.f64(), qx = r.f64(), qy = r.f64(), qz = r.f64();
        f.pose = GripPose::from_unit(p, Quat(qw, qx, qy, qz));
        for (int i = 0; i < 6; ++i) f.velocity[i] = r.f64();
        for (int i = 0; i < 6; ++i) f.wrench[i] = r.f64();
        for (int i = 0; i < 8; ++i) f.tensions[i] = r.f64();
        const std::uint8_t status = r.u8();
        if (status > 2) throw ParseError("<frame log>", frames.size() + 1, "bad solver status");
        f.status = static_cast<SolveStatus>(status);
        f.solver_ran = r.u8() != 0;
        f.scaled = r.u8() != 0;
        f.wrench_scale = r.f64();
        f.trigger = r.u8() != 0;
        f.junction_gap = r.f64();
        if (r.u8() != 0) f.swept = read_contact(r);
        const std::uint32_t nc = r.u32();
        if (!r.ok() || nc > r.remaining() / 64) throw ParseError("<frame log>", frames.size() + 1, "bad contact count");
        for (std::uint32_t i = 0; i < nc; ++i) f.contacts.push_back(read_contact(r));
        const std::uint32_t nb = r.u32();
        if (!r.ok() || nb > r.remaining() / 32) throw ParseError("<frame log>", frames.size() + 1, "bad bead count");
        for (std::uint32_t i = 0; i < nb; ++i) {
            PuttySample s;
            s.position = r.vec3();
            s.time = r.f64();
            f.bead_delta.push_back(s);
        }
        if (!r.done()) throw ParseError("<frame log>", frames.size() + 1, "malformed record");
        frames.push_back(std::move(f));
    }
    return frames;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 15]);
    }
    return out;
}

std::string FrameLog::digest() const { return sha256_hex(bytes_); }

namespace {

nlohmann::json vec_json(const auto& v, int n) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < n; ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json contact_json(const Contact& c) {
    return {{"point", vec_json(c.point, 3)},
            {"normal", vec_json(c.normal, 3)},
            {"depth", c.depth},
            {"primitive", c.primitive},
            {"time_of_impact", c.time_of_impact}};
}

}  // namespace

std::string frames_to_jsonl(std::span<const HapticFrame> frames) {
    std::string out;
    for (const auto& f : frames) {
        const Quat& q = f.pose.orientation();
        nlohmann::json j = {
            {"tick", f.tick},
            {"sim_time", f.sim_time},
            {"position", vec_json(f.pose.position(), 3)},
            {"quaternion", {q.w(), q.x(), q.y(), q.z()}},
            {"velocity", vec_json(f.velocity, 6)},
            {"wrench", vec_json(f.wrench, 6)},
            {"trigger", f.trigger},
            {"junction_gap", f.junction_gap},
        };
        if (f.solver_ran) {
            j["tensions"] = vec_json(f.tensions, 8);
            j["status"] = std::string(to_string(f.status));
            j["scaled"] = f.scaled;
            j["wrench_scale"] = f.wrench_scale;
        }
        if (f.swept) j["swept"] = contact_json(*f.swept);
        j["contacts"] = nlohmann::json::array();
        for (const auto& c : f.contacts) j["contacts"].push_back(contact_json(c));
        j["bead_delta"] = nlohmann::json::array();
        for (const auto& s : f.bead_delta)
            j["bead_delta"].push_back({{"position", vec_json(s.position, 3)}, {"time", s.time}});
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace shw
