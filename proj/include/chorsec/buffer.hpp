#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chorsec/lang.hpp"

namespace chorsec {

using Channel = std::pair<Ep, Ep>;

struct Message {
    Ep from = kNoEndpoint;
    Ep to = kNoEndpoint;
    Value value;
    Channel channel() const { return {from, to}; }
    friend bool operator==(const Message&, const Message&) = default;
    friend auto operator<=>(const Message&, const Message&) = default;
};

std::string channel_name(const Channel& ch, const HostEnv& env);

// Per-channel FIFO queues, stored as one arrival-ordered list.
class Buffer {
public:
    void push(const Message& m) { items_.push_back(m); }
    // Oldest message on `ch`, if any.
    const Message* front(const Channel& ch) const;
    std::optional<Message> pop(const Channel& ch);
    bool empty() const { return items_.empty(); }
    size_t size() const { return items_.size(); }
    size_t count(const Channel& ch) const;
    std::vector<Channel> channels() const;
    std::vector<Value> queue(const Channel& ch) const;
    const std::vector<Message>& items() const { return items_; }
    // Only the messages on channels into `h` from elsewhere.
    Buffer restricted_to(Ep h) const;

    // Equal when every channel holds the same queue.
    friend bool operator==(const Buffer& a, const Buffer& b);

private:
    std::vector<Message> items_;
};

}  // namespace chorsec
