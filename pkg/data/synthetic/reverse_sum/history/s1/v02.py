num = int(input())
rev = 0
n = num
while n > 0:
    d = n % 10
    rev = rev * 10 + d
    n = n // 10
    if n == 0:
        break
print("Reverse:", rev)
print("Sum:", num + rev)
