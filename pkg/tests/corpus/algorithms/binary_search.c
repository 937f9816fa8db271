#include <stdio.h>

int binary_search(const int a[], int n, int target) {
    int lo = 0, hi = n - 1;
    while (lo <= hi) {
        int mid = lo + (hi - lo) / 2;
        if (a[mid] == target)
            return mid;
        else if (a[mid] < target)
            lo = mid + 1;
        else
            hi = mid - 1;
    }
    return -1;
}

int main(void) {
    int v[8] = {1, 3, 5, 7, 9, 11, 13, 15};
    int idx = binary_search(v, 8, 9);
    if (idx < 0) {
        printf("missing\n");
        return 1;
    }
    printf("%d\n", idx);
    return 0;
}
