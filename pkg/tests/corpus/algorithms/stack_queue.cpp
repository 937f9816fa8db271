#include <iostream>

class Stack {
public:
    Stack() { top = 0; }
    void push(int v) {
        data[top] = v;
        top++;
    }
    int pop() {
        top--;
        return data[top];
    }
    bool empty() { return top == 0; }

private:
    int data[64];
    int top;
};

class Queue {
public:
    Queue() { head = 0; tail = 0; }
    void enqueue(int v) {
        buf[tail] = v;
        tail = (tail + 1) % 64;
    }
    int dequeue() {
        int v = buf[head];
        head = (head + 1) % 64;
        return v;
    }

private:
    int buf[64];
    int head;
    int tail;
};

int main() {
    Stack s;
    Queue q;
    for (int i = 0; i < 3; i++) {
        s.push(i);
        q.enqueue(i);
    }
    int total = 0;
    while (!s.empty())
        total += s.pop() * q.dequeue();
    std::cout << total << std::endl;
    return 0;
}
