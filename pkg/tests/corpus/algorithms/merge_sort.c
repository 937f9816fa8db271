#include <stdio.h>
#define MAXN 64

void merge(int a[], int lo, int mid, int hi) {
    int tmp[MAXN];
    int i = lo, j = mid + 1, k = 0;
    while (i <= mid && j <= hi) {
        if (a[i] <= a[j])
            tmp[k++] = a[i++];
        else
            tmp[k++] = a[j++];
    }
    while (i <= mid)
        tmp[k++] = a[i++];
    while (j <= hi)
        tmp[k++] = a[j++];
    for (i = 0; i < k; i++)
        a[lo + i] = tmp[i];
}

void merge_sort(int a[], int lo, int hi) {
    if (lo >= hi)
        return;
    int mid = (lo + hi) / 2;
    merge_sort(a, lo, mid);
    merge_sort(a, mid + 1, hi);
    merge(a, lo, mid, hi);
}

int main(void) {
    int v[7] = {38, 27, 43, 3, 9, 82, 10};
    merge_sort(v, 0, 6);
    printf("%d\n", v[0]);
    return 0;
}
