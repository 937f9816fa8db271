#include <stdio.h>

void swap(int *x, int *y) {
    int t = *x;
    *x = *y;
    *y = t;
}

void selection_sort(int a[], int n) {
    int i, j, min;
    for (i = 0; i < n - 1; i++) {
        min = i;
        for (j = i + 1; j < n; j++)
            if (a[j] < a[min])
                min = j;
        if (min != i)
            swap(&a[min], &a[i]);
    }
}

int main(void) {
    int v[5] = {64, 25, 12, 22, 11};
    selection_sort(v, 5);
    printf("%d\n", v[0]);
    return 0;
}
