#include "chorsec/buffer.hpp"

#include <algorithm>

namespace chorsec {

std::string channel_name(const Channel& ch, const HostEnv& env) {
    return env.name(ch.first) + "->" + env.name(ch.second);
}

const Message* Buffer::front(const Channel& ch) const {
    for (const auto& m : items_)
        if (m.channel() == ch) return &m;
    return nullptr;
}

std::optional<Message> Buffer::pop(const Channel& ch) {
    for (auto it = items_.begin(); it != items_.end(); ++it) {
        if (it->channel() == ch) {
            Message m = *it;
            items_.erase(it);
            return m;
        }
    }
    return std::nullopt;
}

size_t Buffer::count(const Channel& ch) const {
    return static_cast<size_t>(std::count_if(items_.begin(), items_.end(), [&](const Message& m) { return m.channel() == ch; }));
}

std::vector<Channel> Buffer::channels() const {
    std::vector<Channel> out;
    for (const auto& m : items_)
        if (std::find(out.begin(), out.end(), m.channel()) == out.end()) out.push_back(m.channel());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Value> Buffer::queue(const Channel& ch) const {
    std::vector<Value> out;
    for (const auto& m : items_)
        if (m.channel() == ch) out.push_back(m.value);
    return out;
}

Buffer Buffer::restricted_to(Ep h) const {
    Buffer b;
    for (const auto& m : items_)
        if (m.from != h && m.to == h) b.push(m);
    return b;
}

bool operator==(const Buffer& a, const Buffer& b) {
    if (a.size() != b.size()) return false;
    auto sorted = [](const Buffer& x) {
        std::vector<Message> v = x.items_;
        std::stable_sort(v.begin(), v.end(), [](const Message& p, const Message& q) { return p.channel() < q.channel(); });
        return v;
    };
    return sorted(a) == sorted(b);
}

}  // namespace chorsec
