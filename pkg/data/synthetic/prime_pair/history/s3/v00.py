a=int(input())
b=int(input())
n=str(a)
m=str(b)
n1=n[::-1]
m1=m[::-1]
x=int(n1)
y=int(m1)
if x>1
  for i in range(2, x):
    if (x%i)==0:
      p=0
      break
    else:
      p=1
else:
  p=0
