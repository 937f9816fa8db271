#include <stdio.h>

void shell_sort(int a[], int n) {
    int gap = n / 2;
    do {
        for (int i = gap; i < n; i++) {
            int tmp = a[i];
            int j = i;
            while (j >= gap && a[j - gap] > tmp) {
                a[j] = a[j - gap];
                j -= gap;
            }
            a[j] = tmp;
        }
        gap /= 2;
    } while (gap > 0);
}

int main(void) {
    int v[6] = {23, 12, 1, 8, 34, 54};
    shell_sort(v, 6);
    switch (v[0]) {
    case 1:
        printf("sorted\n");
        break;
    default:
        printf("unsorted\n");
    }
    return 0;
}
