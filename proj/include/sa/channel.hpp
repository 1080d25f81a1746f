#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace sa
{

    /// Unbounded multi-producer/multi-consumer queue that can be closed by the producer.
    template <class T>
    class Channel
    {
    public:
        void push(T value)
        {
            {
                std::lock_guard lock(mutex_);
                queue_.push_back(std::move(value));
            }
            ready_.notify_one();
        }

        void close()
        {
            {
                std::lock_guard lock(mutex_);
                closed_ = true;
            }
            ready_.notify_all();
        }

        /// Blocks until a value is available; nullopt once closed and drained.
        std::optional<T> pop()
        {
            std::unique_lock lock(mutex_);
            ready_.wait(lock, [this]
                        { return !queue_.empty() || closed_; });
            if (queue_.empty())
                return std::nullopt;
            T value = std::move(queue_.front());
            queue_.pop_front();
            return value;
        }

    private:
        std::mutex mutex_;
        std::condition_variable ready_;
        std::deque<T> queue_;
        bool closed_ = false;
    };

} // namespace sa
