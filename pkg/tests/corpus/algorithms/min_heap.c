#include <stdio.h>
#define CAP 32

typedef struct {
    int items[CAP];
    int size;
} Heap;

void heap_push(Heap *h, int v) {
    int i = h->size;
    h->size = h->size + 1;
    h->items[i] = v;
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (h->items[parent] <= h->items[i])
            break;
        int t = h->items[parent];
        h->items[parent] = h->items[i];
        h->items[i] = t;
        i = parent;
    }
}

int heap_pop(Heap *h) {
    int top = h->items[0];
    h->size = h->size - 1;
    h->items[0] = h->items[h->size];
    int i = 0;
    for (;;) {
        int l = 2 * i + 1, r = 2 * i + 2, m = i;
        if (l < h->size && h->items[l] < h->items[m])
            m = l;
        if (r < h->size && h->items[r] < h->items[m])
            m = r;
        if (m == i)
            break;
        int t = h->items[m];
        h->items[m] = h->items[i];
        h->items[i] = t;
        i = m;
    }
    return top;
}

int main(void) {
    Heap h;
    h.size = 0;
    heap_push(&h, 5);
    heap_push(&h, 3);
    heap_push(&h, 8);
    printf("%d\n", heap_pop(&h));
    return 0;
}
