n = int(input())
r = 0
m = n
while m > 0:
    r = r * 10 + m % 10
    m //= 10
print("Reverse:", r)
if n >= 0:
    print("Sum:", n + r)
